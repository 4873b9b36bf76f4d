//! Numeric argument parsing with `pi` literals.
//!
//! Accepted forms: plain floats (`0.98`, `1e-3`), `pi`, multiples and
//! fractions of pi (`2pi`, `0.5pi`, `3pi/4`, `-pi/2`).

/// Parse a value that may use pi notation. Returns a finite f64.
pub fn parse_value(text: &str) -> Result<f64, String> {
    let s = text.trim();
    let (negated, s) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let value = match s.find("pi") {
        None => s.parse::<f64>().map_err(|_| format!("`{text}` is not a number"))?,
        Some(pos) => {
            let (coeff_text, rest) = s.split_at(pos);
            let rest = &rest[2..];
            let coeff = if coeff_text.is_empty() {
                1.0
            } else {
                coeff_text.parse::<f64>().map_err(|_| format!("`{text}` is not a number"))?
            };
            let denom = if rest.is_empty() {
                1.0
            } else if let Some(d) = rest.strip_prefix('/') {
                let d = d.parse::<f64>().map_err(|_| format!("`{text}` is not a number"))?;
                if d == 0.0 {
                    return Err(format!("`{text}` divides by zero"));
                }
                d
            } else {
                return Err(format!("`{text}` is not a number"));
            };
            coeff * std::f64::consts::PI / denom
        }
    };
    let value = if negated { -value } else { value };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("`{text}` is not finite"))
    }
}

/// Split a `key=value` argument.
pub fn parse_assignment(text: &str) -> Result<(String, f64), String> {
    match text.split_once('=') {
        Some((key, value)) if !key.is_empty() => Ok((key.to_string(), parse_value(value)?)),
        _ => Err(format!("`{text}` is not of the form key=value")),
    }
}
