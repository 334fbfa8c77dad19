//! The handful of SPARQL functions and operators constraint evaluation needs.

use std::cmp::Ordering;
use std::sync::OnceLock;

use chrono::{Duration, NaiveDate, NaiveDateTime};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use regex::{Regex, RegexBuilder};

use crate::term::{Literal, Term};
use crate::vocab::xsd;

/// Outcome of a SPARQL expression that may raise an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tristate {
    True,
    False,
    Error,
}

impl Tristate {
    pub fn is_true(self) -> bool {
        self == Tristate::True
    }
}

impl From<bool> for Tristate {
    fn from(b: bool) -> Self {
        if b {
            Tristate::True
        } else {
            Tristate::False
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CompareOp {
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    pub const ALL: [CompareOp; 4] = [CompareOp::Lt, CompareOp::Le, CompareOp::Gt, CompareOp::Ge];

    fn holds(self, ord: Ordering) -> bool {
        match self {
            CompareOp::Lt => ord == Ordering::Less,
            CompareOp::Le => ord != Ordering::Greater,
            CompareOp::Gt => ord == Ordering::Greater,
            CompareOp::Ge => ord != Ordering::Less,
        }
    }
}

/// Evaluates `a op b` with the SPARQL operator mapping for numerics,
/// `xsd:string`, `xsd:boolean` and `xsd:dateTime`. Anything else is an error.
pub fn sparql_compare(op: CompareOp, a: &Term, b: &Term) -> Tristate {
    let (Some(a), Some(b)) = (comparable(a), comparable(b)) else {
        return Tristate::Error;
    };
    match (a, b) {
        (Value::Numeric(x), Value::Numeric(y)) => match x.partial_cmp_promoted(&y) {
            Some(ord) => op.holds(ord).into(),
            // NaN compares false with everything
            None => Tristate::False,
        },
        (Value::String(x), Value::String(y)) => op.holds(x.cmp(y)).into(),
        (Value::Boolean(x), Value::Boolean(y)) => op.holds(x.cmp(&y)).into(),
        (Value::DateTime(x), Value::DateTime(y)) => op.holds(x.cmp(&y)).into(),
        _ => Tristate::Error,
    }
}

/// Whether `t` can be an operand of the ordering operators: a literal with a
/// numeric, string, boolean or dateTime datatype and a valid lexical form.
pub fn is_comparable(t: &Term) -> bool {
    comparable(t).is_some()
}

enum Value<'a> {
    Numeric(Numeric),
    String(&'a str),
    Boolean(bool),
    DateTime(DateTimeKey),
}

fn comparable(t: &Term) -> Option<Value<'_>> {
    let lit = t.as_literal()?;
    let dt = lit.datatype().as_str();
    if dt == xsd::STRING {
        return Some(Value::String(lit.lexical()));
    }
    if dt == xsd::BOOLEAN {
        return parse_boolean(lit.lexical()).map(Value::Boolean);
    }
    if dt == xsd::DATE_TIME {
        return parse_date_time(lit.lexical()).map(Value::DateTime);
    }
    parse_numeric(lit).map(Value::Numeric)
}

fn parse_boolean(lexical: &str) -> Option<bool> {
    match lexical {
        "true" | "1" => Some(true),
        "false" | "0" => Some(false),
        _ => None,
    }
}

/// A numeric literal value. Integers and decimals are exact.
#[derive(Clone, Debug)]
enum Numeric {
    Decimal(BigRational),
    Float(f32),
    Double(f64),
}

impl Numeric {
    fn rank(&self) -> u8 {
        match self {
            Numeric::Decimal(_) => 0,
            Numeric::Float(_) => 1,
            Numeric::Double(_) => 2,
        }
    }

    fn to_f64(&self) -> f64 {
        match self {
            Numeric::Decimal(r) => r.to_f64().unwrap_or(f64::NAN),
            Numeric::Float(f) => f64::from(*f),
            Numeric::Double(d) => *d,
        }
    }

    /// Compares after promoting both operands to the wider of their types.
    fn partial_cmp_promoted(&self, other: &Numeric) -> Option<Ordering> {
        match self.rank().max(other.rank()) {
            0 => match (self, other) {
                (Numeric::Decimal(a), Numeric::Decimal(b)) => Some(a.cmp(b)),
                _ => unreachable!(),
            },
            1 => (self.to_f64() as f32).partial_cmp(&(other.to_f64() as f32)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

/// Integer-derived datatypes with their inclusive bounds.
fn integer_bounds(datatype: &str) -> Option<(Option<i128>, Option<i128>)> {
    Some(match datatype {
        xsd::INTEGER => (None, None),
        xsd::NON_POSITIVE_INTEGER => (None, Some(0)),
        xsd::NEGATIVE_INTEGER => (None, Some(-1)),
        xsd::LONG => (Some(i64::MIN.into()), Some(i64::MAX.into())),
        xsd::INT => (Some(i32::MIN.into()), Some(i32::MAX.into())),
        xsd::SHORT => (Some(i16::MIN.into()), Some(i16::MAX.into())),
        xsd::BYTE => (Some(i8::MIN.into()), Some(i8::MAX.into())),
        xsd::NON_NEGATIVE_INTEGER => (Some(0), None),
        xsd::UNSIGNED_LONG => (Some(0), Some(u64::MAX.into())),
        xsd::UNSIGNED_INT => (Some(0), Some(u32::MAX.into())),
        xsd::UNSIGNED_SHORT => (Some(0), Some(u16::MAX.into())),
        xsd::UNSIGNED_BYTE => (Some(0), Some(u8::MAX.into())),
        xsd::POSITIVE_INTEGER => (Some(1), None),
        _ => return None,
    })
}

fn regex(cell: &'static OnceLock<Regex>, pattern: &str) -> &'static Regex {
    cell.get_or_init(|| Regex::new(pattern).expect("static pattern"))
}

fn parse_numeric(lit: &Literal) -> Option<Numeric> {
    static INTEGER: OnceLock<Regex> = OnceLock::new();
    static DECIMAL: OnceLock<Regex> = OnceLock::new();
    static FLOATING: OnceLock<Regex> = OnceLock::new();
    let lexical = lit.lexical();
    let dt = lit.datatype().as_str();
    if let Some((lo, hi)) = integer_bounds(dt) {
        if !regex(&INTEGER, r"^[+-]?[0-9]+$").is_match(lexical) {
            return None;
        }
        let value: BigInt = lexical.trim_start_matches('+').parse().ok()?;
        if lo.is_some_and(|lo| value < BigInt::from(lo)) || hi.is_some_and(|hi| value > BigInt::from(hi)) {
            return None;
        }
        return Some(Numeric::Decimal(BigRational::from_integer(value)));
    }
    match dt {
        xsd::DECIMAL => {
            if !regex(&DECIMAL, r"^[+-]?([0-9]+(\.[0-9]*)?|\.[0-9]+)$").is_match(lexical) {
                return None;
            }
            parse_decimal(lexical).map(Numeric::Decimal)
        }
        xsd::FLOAT | xsd::DOUBLE => {
            let value = match lexical {
                "INF" | "+INF" => f64::INFINITY,
                "-INF" => f64::NEG_INFINITY,
                "NaN" => f64::NAN,
                _ => {
                    let pattern = r"^[+-]?([0-9]+(\.[0-9]*)?|\.[0-9]+)([eE][+-]?[0-9]+)?$";
                    if !regex(&FLOATING, pattern).is_match(lexical) {
                        return None;
                    }
                    if dt == xsd::FLOAT {
                        return lexical.parse::<f32>().ok().map(Numeric::Float);
                    }
                    lexical.parse::<f64>().ok()?
                }
            };
            Some(if dt == xsd::FLOAT { Numeric::Float(value as f32) } else { Numeric::Double(value) })
        }
        _ => None,
    }
}

fn parse_decimal(lexical: &str) -> Option<BigRational> {
    let (negative, digits) = match lexical.as_bytes().first() {
        Some(b'-') => (true, &lexical[1..]),
        Some(b'+') => (false, &lexical[1..]),
        _ => (false, lexical),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    let mantissa: BigInt = format!("0{int_part}{frac_part}").parse().ok()?;
    let scale = BigInt::from(10u8).pow(frac_part.len() as u32);
    let value = BigRational::new(mantissa, scale);
    Some(if negative { -value } else { value })
}

/// Value of an `xsd:integer` literal, saturated to the `i128` range.
pub fn integer_value(t: &Term) -> Option<i128> {
    let lit = t.as_literal().filter(|l| l.has_datatype(xsd::INTEGER))?;
    let Numeric::Decimal(r) = parse_numeric(lit)? else {
        return None;
    };
    let n = r.to_integer();
    Some(n.to_i128().unwrap_or(if n < BigInt::zero() { i128::MIN } else { i128::MAX }))
}

/// A point on the UTC timeline: whole seconds plus the fractional digits
/// with trailing zeros removed, so that tuple order is timeline order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct DateTimeKey {
    seconds: NaiveDateTime,
    fraction: String,
}

fn parse_date_time(lexical: &str) -> Option<DateTimeKey> {
    static DATE_TIME: OnceLock<Regex> = OnceLock::new();
    let pattern = r"^(-?[0-9]{4,})-([0-9]{2})-([0-9]{2})T([0-9]{2}):([0-9]{2}):([0-9]{2})(?:\.([0-9]+))?(Z|[+-][0-9]{2}:[0-9]{2})?$";
    let caps = regex(&DATE_TIME, pattern).captures(lexical)?;
    let num = |i: usize| caps.get(i).map(|m| m.as_str());
    let year: i32 = num(1)?.parse().ok()?;
    let month: u32 = num(2)?.parse().ok()?;
    let day: u32 = num(3)?.parse().ok()?;
    let hour: u32 = num(4)?.parse().ok()?;
    let minute: u32 = num(5)?.parse().ok()?;
    let second: u32 = num(6)?.parse().ok()?;
    let fraction = num(7).unwrap_or("").trim_end_matches('0').to_owned();
    let date = NaiveDate::from_ymd_opt(year, month, day)?;
    let mut local = if hour == 24 {
        if minute != 0 || second != 0 || !fraction.is_empty() {
            return None;
        }
        date.and_hms_opt(0, 0, 0)?.checked_add_signed(Duration::days(1))?
    } else {
        date.and_hms_opt(hour, minute, second)?
    };
    if let Some(tz) = num(8).filter(|tz| *tz != "Z") {
        let sign = if tz.starts_with('-') { -1 } else { 1 };
        let h: i64 = tz[1..3].parse().ok()?;
        let m: i64 = tz[4..6].parse().ok()?;
        if h > 14 || m > 59 || (h == 14 && m != 0) {
            return None;
        }
        local = local.checked_sub_signed(Duration::minutes(sign * (h * 60 + m)))?;
    }
    Some(DateTimeKey { seconds: local, fraction })
}

/// The SPARQL `str` of an IRI or literal; `None` for blank nodes.
pub fn sparql_str(t: &Term) -> Option<&str> {
    match t {
        Term::Iri(iri) => Some(iri.as_str()),
        Term::Literal(l) => Some(l.lexical()),
        Term::Blank(_) => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RegexError {
    #[error("unknown regular expression flag `{0}`")]
    UnknownFlag(char),
    #[error("invalid regular expression: {0}")]
    InvalidPattern(String),
}

/// Compiles `pattern` with SPARQL REGEX flags: `i`, `s`, `m` and `x`.
pub fn compile_regex(pattern: &str, flags: &str) -> Result<Regex, RegexError> {
    let mut builder = RegexBuilder::new(pattern);
    for flag in flags.chars() {
        match flag {
            'i' => builder.case_insensitive(true),
            's' => builder.dot_matches_new_line(true),
            'm' => builder.multi_line(true),
            'x' => builder.ignore_whitespace(true),
            other => return Err(RegexError::UnknownFlag(other)),
        };
    }
    builder.build().map_err(|e| RegexError::InvalidPattern(e.to_string()))
}

/// SPARQL `REGEX(s, pattern, flags)`: true when `s` contains a match.
pub fn regex_match(s: &str, pattern: &str, flags: &str) -> Tristate {
    match compile_regex(pattern, flags) {
        Ok(re) => re.is_match(s).into(),
        Err(_) => Tristate::Error,
    }
}

/// SPARQL `STRSTARTS`.
pub fn str_starts(s: &str, prefix: &str) -> bool {
    s.starts_with(prefix)
}

/// SPARQL `langMatches` with basic filtering.
pub fn lang_matches(tag: &str, range: &str) -> bool {
    if tag.is_empty() {
        return false;
    }
    if range == "*" {
        return true;
    }
    tag.eq_ignore_ascii_case(range)
        || (tag.len() > range.len()
            && tag.as_bytes()[range.len()] == b'-'
            && tag.is_char_boundary(range.len())
            && tag[..range.len()].eq_ignore_ascii_case(range))
}
