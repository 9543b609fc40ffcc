//! Rational helpers: serde as `"n/d"` strings (`"n"` when whole) and
//! fixed-point decimal rendering.

use std::fmt::Display;
use std::str::FromStr;

use num_rational::Ratio;
use num_integer::Integer;
use serde::{de, Deserialize, Deserializer, Serializer};

pub fn serialize<T, S>(r: &Ratio<T>, s: S) -> Result<S::Ok, S::Error>
where
    T: Clone + Integer + Display,
    S: Serializer,
{
    s.collect_str(r)
}

pub fn deserialize<'de, T, D>(d: D) -> Result<Ratio<T>, D::Error>
where
    T: Clone + Integer + FromStr,
    D: Deserializer<'de>,
{
    let text = String::deserialize(d)?;
    parse(&text).ok_or_else(|| de::Error::custom(format!("bad rational `{text}`")))
}

pub fn parse<T: Clone + Integer + FromStr>(text: &str) -> Option<Ratio<T>> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let d: T = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Ratio::new(n.trim().parse().ok()?, d))
        }
        None => Some(Ratio::from_integer(text.parse().ok()?)),
    }
}

/// Rounds half away from zero to `places` decimals, e.g. `94.1` for 32/34 × 100.
pub fn to_decimal<T>(r: &Ratio<T>, places: u32) -> String
where
    T: Clone + Integer + Display + From<u32>,
{
    let scale: T = (0..places).fold(T::one(), |acc, _| acc * T::from(10u32));
    let two = T::one() + T::one();
    let scaled = r.clone() * Ratio::from_integer(scale.clone());
    let rounded = (scaled.numer().clone() * two.clone() + scaled.denom().clone()) / (scaled.denom().clone() * two);
    let int = rounded.clone() / scale.clone();
    let frac = rounded % scale;
    if places == 0 {
        return int.to_string();
    }
    let frac = frac.to_string();
    format!("{int}.{}{frac}", "0".repeat(places as usize - frac.len()))
}

/// Like [`to_decimal`] but without trailing zeros: `0.7`, `2`, `5.93`.
pub fn to_short_decimal<T>(r: &Ratio<T>, places: u32) -> String
where
    T: Clone + Integer + Display + From<u32>,
{
    let s = to_decimal(r, places);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub mod option {
    use super::*;

    pub fn serialize<T, S>(r: &Option<Ratio<T>>, s: S) -> Result<S::Ok, S::Error>
    where
        T: Clone + Integer + Display,
        S: Serializer,
    {
        match r {
            Some(r) => s.collect_str(r),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<Option<Ratio<T>>, D::Error>
    where
        T: Clone + Integer + FromStr,
        D: Deserializer<'de>,
    {
        match Option::<String>::deserialize(d)? {
            None => Ok(None),
            Some(text) => parse(&text)
                .map(Some)
                .ok_or_else(|| de::Error::custom(format!("bad rational `{text}`"))),
        }
    }
}

pub mod map {
    use std::collections::BTreeMap;

    use super::*;
    use serde::ser::SerializeMap;

    pub fn serialize<T, S>(m: &BTreeMap<String, Ratio<T>>, s: S) -> Result<S::Ok, S::Error>
    where
        T: Clone + Integer + Display,
        S: Serializer,
    {
        let mut out = s.serialize_map(Some(m.len()))?;
        for (k, v) in m {
            out.serialize_entry(k, &v.to_string())?;
        }
        out.end()
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<BTreeMap<String, Ratio<T>>, D::Error>
    where
        T: Clone + Integer + FromStr,
        D: Deserializer<'de>,
    {
        BTreeMap::<String, String>::deserialize(d)?
            .into_iter()
            .map(|(k, text)| match parse(&text) {
                Some(r) => Ok((k, r)),
                None => Err(de::Error::custom(format!("bad rational `{text}` for `{k}`"))),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals() {
        assert_eq!(to_decimal(&Ratio::<u64>::new(3200, 34), 1), "94.1");
        assert_eq!(to_decimal(&Ratio::<u64>::new(65, 34), 2), "1.91");
        assert_eq!(to_decimal(&Ratio::<u64>::new(309, 10), 1), "30.9");
        assert_eq!(to_decimal(&Ratio::<u64>::new(1, 20), 1), "0.1");
        assert_eq!(to_decimal(&Ratio::<u64>::from_integer(100), 1), "100.0");
        assert_eq!(to_short_decimal(&Ratio::<u64>::new(7, 10), 2), "0.7");
        assert_eq!(to_short_decimal(&Ratio::<u64>::from_integer(2), 2), "2");
        assert_eq!(to_decimal(&Ratio::<u64>::new(1, 200), 2), "0.01");
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse::<u64>("3/6"), Some(Ratio::new(1, 2)));
        assert_eq!(parse::<u64>(" 4 "), Some(Ratio::from_integer(4)));
        assert_eq!(parse::<u64>("1/0"), None);
        assert_eq!(parse::<u64>("x"), None);
    }
}
