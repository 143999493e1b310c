use crate::error::{Error, Result};
use crate::scalar::Real;

/// Number of control channels: (u_x¹, u_y¹, u_x², u_y²).
pub const CHANNELS: usize = 4;

/// Control channels in storage order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    Ux1 = 0,
    Uy1 = 1,
    Ux2 = 2,
    Uy2 = 3,
}

impl Channel {
    pub const ALL: [Channel; CHANNELS] = [Channel::Ux1, Channel::Uy1, Channel::Ux2, Channel::Uy2];
}

/// Piecewise-constant control pulse: `M` uniform slices over `duration`
/// seconds, four amplitudes (Hz) per slice.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSequence<T: Real> {
    duration: T,
    amplitudes: Vec<[T; CHANNELS]>,
    cap: Option<T>,
}

impl<T: Real> PulseSequence<T> {
    pub fn new(duration: T, amplitudes: Vec<[T; CHANNELS]>) -> Result<Self> {
        Self::with_cap(duration, amplitudes, None)
    }

    pub fn with_cap(duration: T, amplitudes: Vec<[T; CHANNELS]>, cap: Option<T>) -> Result<Self> {
        if !(duration > T::zero() && duration.is_finite()) {
            return Err(Error::Usage(format!("pulse duration must be positive and finite, got {duration}")));
        }
        if amplitudes.is_empty() {
            return Err(Error::Usage("pulse must have at least one slice".into()));
        }
        if let Some(c) = cap {
            if !(c > T::zero()) {
                return Err(Error::Usage(format!("amplitude cap must be positive, got {c}")));
            }
        }
        for (m, row) in amplitudes.iter().enumerate() {
            for (k, &a) in row.iter().enumerate() {
                if !a.is_finite() {
                    return Err(Error::Usage(format!("amplitude at slice {m}, channel {k} is not finite")));
                }
                if let Some(c) = cap {
                    if a.abs() > c {
                        return Err(Error::Usage(format!(
                            "amplitude {a} at slice {m}, channel {k} exceeds cap {c}"
                        )));
                    }
                }
            }
        }
        Ok(Self { duration, amplitudes, cap })
    }

    pub fn zeros(duration: T, slices: usize) -> Result<Self> {
        Self::new(duration, vec![[T::zero(); CHANNELS]; slices])
    }

    pub fn duration(&self) -> T {
        self.duration
    }

    pub fn slices(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn slice_duration(&self) -> T {
        self.duration / T::from_count(self.slices())
    }

    pub fn amplitudes(&self) -> &[[T; CHANNELS]] {
        &self.amplitudes
    }

    pub fn cap(&self) -> Option<T> {
        self.cap
    }

    pub fn amplitude(&self, slice: usize, channel: Channel) -> T {
        self.amplitudes[slice][channel as usize]
    }

    /// Total number of control parameters (`4M`).
    pub fn parameter_count(&self) -> usize {
        self.slices() * CHANNELS
    }

    /// New pulse with `u + step·du` and duration `duration + step·dt`.
    /// Amplitudes are clipped to the cap when one is set.
    pub fn stepped(&self, du: &[[T; CHANNELS]], step: T, dt: T) -> Result<Self> {
        if du.len() != self.slices() {
            return Err(Error::Usage(format!(
                "step direction has {} slices, pulse has {}",
                du.len(),
                self.slices()
            )));
        }
        let amplitudes = self
            .amplitudes
            .iter()
            .zip(du)
            .map(|(row, drow)| {
                std::array::from_fn(|k| {
                    let v = row[k] + step * drow[k];
                    match self.cap {
                        Some(c) => v.max(-c).min(c),
                        None => v,
                    }
                })
            })
            .collect();
        Self::with_cap(self.duration + step * dt, amplitudes, self.cap)
    }

    pub fn with_duration(&self, duration: T) -> Result<Self> {
        Self::with_cap(duration, self.amplitudes.clone(), self.cap)
    }

    pub fn with_amplitudes(&self, amplitudes: Vec<[T; CHANNELS]>) -> Result<Self> {
        Self::with_cap(self.duration, amplitudes, self.cap)
    }

    /// Split at slice `at`: the halves have durations proportional to their
    /// slice counts, so propagating them in turn equals propagating `self`.
    pub fn split_at(&self, at: usize) -> Result<(Self, Self)> {
        if at == 0 || at >= self.slices() {
            return Err(Error::Usage(format!("split index {at} out of range 1..{}", self.slices())));
        }
        let dt = self.slice_duration();
        let (a, b) = self.amplitudes.split_at(at);
        Ok((
            Self::with_cap(dt * T::from_count(at), a.to_vec(), self.cap)?,
            Self::with_cap(dt * T::from_count(self.slices() - at), b.to_vec(), self.cap)?,
        ))
    }

    /// Every slice repeated twice; same duration, so the physical pulse is unchanged.
    pub fn refined(&self) -> Self {
        let amplitudes = self.amplitudes.iter().flat_map(|row| [*row, *row]).collect();
        Self {
            duration: self.duration,
            amplitudes,
            cap: self.cap,
        }
    }
}

/// Nominal model of the spin pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemModel<T: Real> {
    coupling_g: T,
}

impl<T: Real> SystemModel<T> {
    pub fn new(coupling_g: T) -> Result<Self> {
        if !(coupling_g > T::zero() && coupling_g.is_finite()) {
            return Err(Error::config("model.g_hz", format!("coupling must be > 0, got {coupling_g}")));
        }
        Ok(Self { coupling_g })
    }

    /// J-coupling in Hz.
    pub fn coupling_g(&self) -> T {
        self.coupling_g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(PulseSequence::<f64>::new(0.0, vec![[0.0; 4]]).is_err());
        assert!(PulseSequence::<f64>::new(1e-3, vec![]).is_err());
        assert!(PulseSequence::<f64>::new(1e-3, vec![[f64::NAN, 0.0, 0.0, 0.0]]).is_err());
        assert!(PulseSequence::<f64>::with_cap(1e-3, vec![[10.0, 0.0, 0.0, 0.0]], Some(5.0)).is_err());
        assert!(SystemModel::<f64>::new(0.0).is_err());
    }

    #[test]
    fn step_clips_to_cap() {
        let p = PulseSequence::<f64>::with_cap(1e-3, vec![[4.0, 0.0, 0.0, 0.0]], Some(5.0)).unwrap();
        let q = p.stepped(&[[10.0, -10.0, 0.0, 0.0]], 1.0, -1e-4).unwrap();
        assert_eq!(q.amplitudes()[0], [5.0, -5.0, 0.0, 0.0]);
        assert!((q.duration() - 9e-4).abs() < 1e-18);
    }
}
