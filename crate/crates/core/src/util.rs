/// Formats a float with 17 significant digits, enough to round-trip any f64.
/// All machine-readable text output (JSON reports, CSV histograms, printed
/// losses) goes through this so results diff cleanly across runs.
pub fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::sig17;

    #[test]
    fn sig17_round_trips() {
        for v in [0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 6.02059991327962, 1e-300] {
            assert_eq!(sig17(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn sig17_has_17_digits() {
        assert_eq!(sig17(1.0), "1.0000000000000000e0");
        assert_eq!(sig17(-0.5), "-5.0000000000000000e-1");
    }
}
