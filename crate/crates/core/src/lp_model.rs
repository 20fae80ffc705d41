//! LP instances in symmetric max form (`max c'x` s.t. `Ax <= b`, `x >= 0`),
//! their validation, equality-row encoding, benchmark generators, and the
//! JSON instance file format.

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::arith::{format_exact, parse_number, rat, Rational};

/// A validated LP instance: maximize `c'x` subject to `Ax <= b`, `x >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpInstance {
    name: String,
    m: usize,
    n: usize,
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    c: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    /// One or more structural invariants failed; every violation is listed.
    #[error("invalid instance: {}", violations.join("; "))]
    Invalid { violations: Vec<String> },
    #[error("malformed instance JSON: {0}")]
    Json(String),
    #[error("empty entry range")]
    EmptyRange,
}

impl LpInstance {
    /// Validates candidate data and returns a well-formed instance, or an
    /// error listing every violated invariant.
    pub fn validate(
        name: impl Into<String>,
        c: Vec<Rational>,
        a: Vec<Vec<Rational>>,
        b: Vec<Rational>,
    ) -> Result<Self, InstanceError> {
        let mut violations = Vec::new();
        let m = a.len();
        let n = c.len();
        if m == 0 {
            violations.push("constraint matrix A is empty (m = 0)".to_string());
        }
        if n == 0 {
            violations.push("objective c is empty (n = 0)".to_string());
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != n {
                violations.push(format!(
                    "A row {} has {} entries, expected n = {}",
                    i + 1,
                    row.len(),
                    n
                ));
            }
        }
        if b.len() != m {
            violations.push(format!("b has {} entries, expected m = {}", b.len(), m));
        }
        if violations.is_empty() {
            Ok(LpInstance {
                name: name.into(),
                m,
                n,
                a,
                b,
                c,
            })
        } else {
            Err(InstanceError::Invalid { violations })
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Constraint matrix rows (0-based).
    pub fn a(&self) -> &[Vec<Rational>] {
        &self.a
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn c(&self) -> &[Rational] {
        &self.c
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Parses the instance file format:
    /// `{ "name": string, "c": [Num], "A": [[Num]], "b": [Num] }`
    /// where `Num` is a JSON integer, a decimal string, or a `"p/q"` string.
    /// Unknown fields are rejected; plain JSON floats are rejected because
    /// they cannot be read exactly.
    pub fn from_json_str(text: &str) -> Result<Self, InstanceError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| InstanceError::Json(e.to_string()))?;
        Self::from_json(&value)
    }

    pub fn from_json(value: &Value) -> Result<Self, InstanceError> {
        let obj = value
            .as_object()
            .ok_or_else(|| InstanceError::Json("top level must be an object".to_string()))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "name" | "c" | "A" | "b") {
                return Err(InstanceError::Json(format!("unknown field {key:?}")));
            }
        }
        let name = obj
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| InstanceError::Json("missing or non-string \"name\"".to_string()))?
            .to_string();
        let mut violations = Vec::new();
        let c = number_vector(obj.get("c"), "c", &mut violations);
        let b = number_vector(obj.get("b"), "b", &mut violations);
        let a = match obj.get("A").and_then(Value::as_array) {
            Some(rows) => rows
                .iter()
                .enumerate()
                .map(|(i, row)| number_vector(Some(row), &format!("A[{}]", i + 1), &mut violations))
                .collect(),
            None => {
                violations.push("missing or non-array \"A\"".to_string());
                Vec::new()
            }
        };
        if !violations.is_empty() {
            return Err(InstanceError::Invalid { violations });
        }
        Self::validate(name, c, a, b)
    }

    /// Serializes in the instance file format. Integer entries are emitted as
    /// JSON integers where they fit, exact strings otherwise.
    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "c": self.c.iter().map(number_to_json).collect::<Vec<_>>(),
            "A": self
                .a
                .iter()
                .map(|row| row.iter().map(number_to_json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "b": self.b.iter().map(number_to_json).collect::<Vec<_>>(),
        })
    }
}

fn number_to_json(v: &Rational) -> Value {
    use num_traits::ToPrimitive;
    if v.is_integer() {
        if let Some(i) = v.numer().to_i64() {
            return json!(i);
        }
    }
    Value::String(format_exact(v))
}

fn number_from_json(value: &Value, location: &str, violations: &mut Vec<String>) -> Rational {
    match value {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                rat(i)
            } else {
                violations.push(format!(
                    "{location}: JSON number {n} is not an exactly-readable integer; \
                     quote decimals as strings (e.g. \"0.83\")"
                ));
                Rational::zero()
            }
        }
        Value::String(s) => match parse_number(s) {
            Ok(v) => v,
            Err(e) => {
                violations.push(format!("{location}: {e}"));
                Rational::zero()
            }
        },
        other => {
            violations.push(format!("{location}: expected number, got {other}"));
            Rational::zero()
        }
    }
}

fn number_vector(value: Option<&Value>, field: &str, violations: &mut Vec<String>) -> Vec<Rational> {
    match value.and_then(Value::as_array) {
        Some(items) => items
            .iter()
            .enumerate()
            .map(|(i, v)| number_from_json(v, &format!("{field}[{}]", i + 1), violations))
            .collect(),
        None => {
            violations.push(format!("missing or non-array \"{field}\""));
            Vec::new()
        }
    }
}

/// Encodes a mixed system of inequality rows and equality rows into pure
/// `<=` form: each equality `(a, beta)` becomes the adjacent pair `(a, beta)`
/// and `(-a, -beta)`. Inequality rows pass through first, in input order;
/// the equality pairs follow.
pub fn encode_equalities(
    name: impl Into<String>,
    ineq_rows: &[(Vec<Rational>, Rational)],
    eq_rows: &[(Vec<Rational>, Rational)],
    c: Vec<Rational>,
) -> Result<LpInstance, InstanceError> {
    let mut a = Vec::with_capacity(ineq_rows.len() + 2 * eq_rows.len());
    let mut b = Vec::with_capacity(ineq_rows.len() + 2 * eq_rows.len());
    for (row, rhs) in ineq_rows {
        a.push(row.clone());
        b.push(rhs.clone());
    }
    for (row, rhs) in eq_rows {
        a.push(row.clone());
        b.push(rhs.clone());
        a.push(row.iter().map(|v| -v.clone()).collect());
        b.push(-rhs.clone());
    }
    LpInstance::validate(name, c, a, b)
}

/// The n-variable Klee-Minty family: `c_j = 10^(n-j)`, unit diagonal,
/// `A[i][j] = 2 * 10^(i-j)` below it, and `b_i = 100^(i-1)` (1-based).
pub fn klee_minty(n: usize) -> Result<LpInstance, InstanceError> {
    if n == 0 {
        return Err(InstanceError::Invalid {
            violations: vec!["Klee-Minty size must be at least 1".to_string()],
        });
    }
    let ten = BigInt::from(10u32);
    let hundred = BigInt::from(100u32);
    let c: Vec<Rational> = (0..n)
        .map(|j| Rational::from_integer(ten.pow((n - 1 - j) as u32)))
        .collect();
    let a: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        rat(1)
                    } else if j < i {
                        Rational::from_integer(BigInt::from(2u32) * ten.pow((i - j) as u32))
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let b: Vec<Rational> = (0..n)
        .map(|i| Rational::from_integer(hundred.pow(i as u32)))
        .collect();
    LpInstance::validate(format!("klee-minty-{n}"), c, a, b)
}

/// SplitMix64 (Steele, Lea & Vigna): the 64-bit seed is the entire generator
/// state, so instance streams reproduce bit-for-bit on any platform or
/// language. Constants are the reference ones.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `lo..=hi` by modulo reduction (the tiny ranges used
    /// here make the modulo bias irrelevant next to reproducibility).
    pub fn next_in_range(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let width = (hi - lo) as u128 + 1;
        let draw = (self.next_u64() as u128) % width;
        (lo as i128 + draw as i128) as i64
    }
}

/// Deterministic random instance: integer entries drawn uniformly from
/// `entry_range`, filling A row-major, then b, then c.
pub fn random_instance(
    m: usize,
    n: usize,
    seed: u64,
    entry_range: (i64, i64),
) -> Result<LpInstance, InstanceError> {
    let (lo, hi) = entry_range;
    if lo > hi {
        return Err(InstanceError::EmptyRange);
    }
    if m == 0 || n == 0 {
        return Err(InstanceError::Invalid {
            violations: vec![format!("dimensions must be positive, got m={m}, n={n}")],
        });
    }
    let mut rng = SplitMix64::new(seed);
    let a: Vec<Vec<Rational>> = (0..m)
        .map(|_| (0..n).map(|_| rat(rng.next_in_range(lo, hi))).collect())
        .collect();
    let b: Vec<Rational> = (0..m).map(|_| rat(rng.next_in_range(lo, hi))).collect();
    let c: Vec<Rational> = (0..n).map(|_| rat(rng.next_in_range(lo, hi))).collect();
    LpInstance::validate(format!("random-m{m}-n{n}-seed{seed}"), c, a, b)
}
