use bellopt::ComplexMatrix4;

/// Seconds as milliseconds with three significant figures.
pub fn ms3(seconds: f64) -> String {
    let v = seconds * 1e3;
    if v == 0.0 || !v.is_finite() {
        return format!("{v} ms");
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (2 - mag).max(0) as usize;
    let rounded = format!("{v:.decimals$}");
    // rounding can carry into a new digit (9.995 → 10.00)
    let carried: f64 = rounded.parse().unwrap_or(v);
    if carried != 0.0 && (carried.abs().log10().floor() as i32) > mag {
        let decimals = (1 - mag).max(0) as usize;
        return format!("{v:.decimals$} ms");
    }
    format!("{rounded} ms")
}

/// Hours with three significant figures.
pub fn hours3(hours: f64) -> String {
    if hours == 0.0 {
        return "0 h".into();
    }
    let mag = hours.abs().log10().floor() as i32;
    let decimals = (2 - mag).max(0) as usize;
    format!("{hours:.decimals$} h")
}

/// Four non-comment lines of eight numbers: `re im` for each column.
pub fn parse_unitary(text: &str) -> Result<ComplexMatrix4, (usize, String)> {
    let mut rows = [[(0.0, 0.0); 4]; 4];
    let mut row = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if row == 4 {
            return Err((idx + 1, "more than four rows".into()));
        }
        let nums: Vec<f64> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|e| (idx + 1, format!("`{s}`: {e}"))))
            .collect::<Result<_, _>>()?;
        if nums.len() != 8 {
            return Err((idx + 1, format!("expected 8 numbers, found {}", nums.len())));
        }
        for col in 0..4 {
            rows[row][col] = (nums[2 * col], nums[2 * col + 1]);
        }
        row += 1;
    }
    if row != 4 {
        return Err((text.lines().count(), format!("expected four rows, found {row}")));
    }
    Ok(ComplexMatrix4::from_rows(rows))
}
