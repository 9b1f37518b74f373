use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Shorthand for the rational `num/den`. Panics when `den == 0`.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(value))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Canonical text form: `n` for integers, `n/d` with `d > 1` otherwise.
pub fn format_rational(value: &BigRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Strict inverse of [`format_rational`]: rejects signs on zero, leading
/// zeros, explicit `+`, unit denominators and unreduced fractions.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    fn parse_int(digits: &str, allow_sign: bool) -> Option<BigInt> {
        let (negative, body) = match digits.strip_prefix('-') {
            Some(rest) if allow_sign => (true, rest),
            Some(_) => return None,
            None => (false, digits),
        };
        if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        if body.len() > 1 && body.starts_with('0') {
            return None;
        }
        if negative && body == "0" {
            return None;
        }
        let magnitude: BigInt = body.parse().ok()?;
        Some(if negative { -magnitude } else { magnitude })
    }

    match text.split_once('/') {
        None => parse_int(text, true).map(BigRational::from_integer),
        Some((num, den)) => {
            let num = parse_int(num, true)?;
            let den = parse_int(den, false)?;
            if den <= BigInt::one() || num.is_zero() || !num.gcd(&den).is_one() {
                return None;
            }
            Some(BigRational::new_raw(num, den))
        }
    }
}

/// Exact rational value of a finite double.
pub fn from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

pub fn to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        // Ratio of huge integers: scale both down before dividing.
        let shift = value.numer().bits().max(value.denom().bits()).saturating_sub(1000);
        let n = (value.numer() >> shift).to_f64().unwrap_or(0.0);
        let d = (value.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Best rational approximation of `x` whose denominator does not exceed
/// `max_den`, found from the continued-fraction expansion of the exact binary
/// value of `x` (convergents and the best admissible semiconvergent).
pub fn approx_rational(x: f64, max_den: &BigInt) -> BigRational {
    let exact = match from_f64(x) {
        Some(v) => v,
        None => return BigRational::zero(),
    };
    if exact.denom() <= max_den {
        return exact;
    }
    let negative = exact.is_negative();
    let target = exact.abs();

    // h/k convergents: (h_{-2}, k_{-2}) = (0, 1), (h_{-1}, k_{-1}) = (1, 0).
    let (mut h_prev, mut k_prev) = (BigInt::zero(), BigInt::one());
    let (mut h, mut k) = (BigInt::one(), BigInt::zero());
    let mut num = target.numer().clone();
    let mut den = target.denom().clone();
    let best = loop {
        if den.is_zero() {
            break BigRational::new(h.clone(), k.clone());
        }
        let (a, r) = num.div_rem(&den);
        let k_next = &a * &k + &k_prev;
        if &k_next > max_den {
            // Largest semiconvergent still within the bound.
            let t = (max_den - &k_prev) / &k;
            let candidate = if t.is_positive() {
                Some(BigRational::new(&t * &h + &h_prev, &t * &k + &k_prev))
            } else {
                None
            };
            let convergent = BigRational::new(h.clone(), k.clone());
            break match candidate {
                Some(c) if (&c - &target).abs() < (&convergent - &target).abs() => c,
                _ => convergent,
            };
        }
        let h_next = &a * &h + &h_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        num = std::mem::replace(&mut den, r);
    };
    if negative {
        -best
    } else {
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_and_parses_canonically() {
        for (value, text) in [(rat(42, 1), "42"), (rat(-3, 4), "-3/4"), (rat(0, 5), "0")] {
            assert_eq!(format_rational(&value), text);
            assert_eq!(parse_rational(text), Some(value));
        }
        for bad in ["+1", "-0", "01", "2/4", "3/1", "1/0", "1/-2", "", "1.5", "0/3", "-"] {
            assert_eq!(parse_rational(bad), None, "{bad} accepted");
        }
    }

    #[test]
    fn approximation_respects_bound() {
        let bound = BigInt::from(1000);
        assert_eq!(approx_rational(0.9999998, &bound), rat(1, 1));
        assert_eq!(approx_rational(std::f64::consts::PI, &bound), rat(355, 113));
        assert_eq!(approx_rational(-0.5, &bound), rat(-1, 2));
        assert_eq!(approx_rational(1234567.0, &bound), int(1234567));
        let third = approx_rational(1.0 / 3.0 + 1e-12, &BigInt::from(10u64.pow(6)));
        assert_eq!(third, rat(1, 3));
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), BigInt::one());
        assert_eq!(factorial(6), BigInt::from(720));
    }
}
