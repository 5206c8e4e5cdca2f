use polarphi_core::harness::{default_p_grid, geometric_grid};
use polarphi_core::{Error, Exponent};

/// Parses an exponent grid and adds the anchors `1`, `2` and `∞`.
pub fn parse_p_grid(text: &str) -> Result<Vec<Exponent>, Error> {
    let text = text.trim();
    let mut grid = if text == "default" {
        default_p_grid()
    } else if let Some(rest) = text.strip_prefix("geom:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let bad = || Error::Domain(format!("grid '{text}' must look like geom:LO:HI:COUNT"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].parse().map_err(|_| bad())?;
        let count: usize = parts[2].parse().map_err(|_| bad())?;
        if !(lo >= 1.0 && hi > lo && hi.is_finite() && count >= 2) {
            return Err(bad());
        }
        geometric_grid(lo, hi, count)
            .into_iter()
            .map(Exponent::new)
            .collect::<Result<_, _>>()?
    } else {
        text.split(',')
            .map(str::parse)
            .collect::<Result<Vec<Exponent>, _>>()?
    };
    grid.extend([Exponent::ONE, Exponent::TWO, Exponent::Infinite]);
    grid.sort_by(|a, b| a.value().total_cmp(&b.value()));
    grid.dedup();
    Ok(grid)
}
