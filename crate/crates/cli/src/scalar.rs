use std::fmt;
use std::str::FromStr;

use peacekit::Rational;

/// A threshold given on the command line: `a/b` is kept exact, anything else
/// is read as a float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScalarArg {
    Exact(Rational),
    Float(f64),
}

impl FromStr for ScalarArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: i64 = num.trim().parse().map_err(|_| format!("bad numerator in `{s}`"))?;
            let den: i64 = den.trim().parse().map_err(|_| format!("bad denominator in `{s}`"))?;
            if den == 0 {
                return Err(format!("zero denominator in `{s}`"));
            }
            return Ok(ScalarArg::Exact(Rational::new(num, den)));
        }
        s.parse::<f64>()
            .map(ScalarArg::Float)
            .map_err(|_| format!("expected a number or a fraction a/b, got `{s}`"))
    }
}

impl fmt::Display for ScalarArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarArg::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            ScalarArg::Float(x) => write!(f, "{x}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_forms() {
        assert_eq!("1/2".parse::<ScalarArg>().unwrap(), ScalarArg::Exact(Rational::new(1, 2)));
        assert_eq!("0.25".parse::<ScalarArg>().unwrap(), ScalarArg::Float(0.25));
        assert!("1/0".parse::<ScalarArg>().is_err());
        assert!("x".parse::<ScalarArg>().is_err());
        assert_eq!("2/4".parse::<ScalarArg>().unwrap().to_string(), "1/2");
    }
}
