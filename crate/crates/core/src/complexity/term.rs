use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use serde::{Serialize, Serializer};

/// Primitive symbols a complexity term is built from.
///
/// The declaration order is the order factors are printed inside a product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    /// Processing-stage cost of an abstract algorithm, printed `C(ε)`.
    Algo,
    R,
    S,
    T,
    K,
    LogK,
    /// `log(k + 1)`.
    LogK1,
    M,
    SqrtN,
    N,
    LogN,
}

impl Factor {
    fn symbol(self) -> &'static str {
        match self {
            Factor::Algo => "C(ε)",
            Factor::R => "R",
            Factor::S => "s",
            Factor::T => "t",
            Factor::K => "k",
            Factor::LogK => "log(k)",
            Factor::LogK1 => "log(k+1)",
            Factor::M => "m",
            Factor::SqrtN => "√N",
            Factor::N => "N",
            Factor::LogN => "log(N)",
        }
    }
}

fn superscript(e: u32) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    e.to_string()
        .chars()
        .map(|d| DIGITS[d.to_digit(10).unwrap() as usize])
        .collect()
}

/// Product of factors with positive integer exponents.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(BTreeMap<Factor, u32>);

impl Monomial {
    pub fn new(factors: &[(Factor, u32)]) -> Self {
        let mut m = BTreeMap::new();
        for &(f, e) in factors {
            if e > 0 {
                *m.entry(f).or_insert(0) += e;
            }
        }
        Monomial(m)
    }

    pub fn exponent(&self, f: Factor) -> u32 {
        self.0.get(&f).copied().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    /// Canonical sort key: the algorithm symbol first, then ascending growth
    /// in N (powers of N before powers of log N), then the other symbols.
    fn sort_key(&self) -> impl Ord {
        let e = |f| self.exponent(f);
        (
            std::cmp::Reverse(e(Factor::Algo)),
            2 * e(Factor::N) + e(Factor::SqrtN),
            e(Factor::LogN),
            [
                e(Factor::K),
                e(Factor::LogK),
                e(Factor::LogK1),
                e(Factor::M),
                e(Factor::S),
                e(Factor::T),
                e(Factor::R),
            ],
        )
    }

    fn evaluate(&self, p: &Params) -> f64 {
        self.0
            .iter()
            .map(|(&f, &e)| p.value_of(f).powi(e as i32))
            .product()
    }
}

impl Mul for &Monomial {
    type Output = Monomial;

    fn mul(self, rhs: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (&f, &e) in &rhs.0 {
            *out.entry(f).or_insert(0) += e;
        }
        Monomial(out)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(&fac, &e)| match (fac, e) {
                (_, 1) => fac.symbol().to_string(),
                (Factor::LogN, e) => format!("log{}(N)", superscript(e)),
                (Factor::LogK, e) => format!("log{}(k)", superscript(e)),
                (Factor::LogK1, e) => format!("log{}(k+1)", superscript(e)),
                (Factor::Algo, e) => format!("C(ε){}", superscript(e)),
                (_, e) => format!("{}{}", fac.symbol(), superscript(e)),
            })
            .collect();
        write!(f, "{}", parts.join("·"))
    }
}

/// Evaluation point for complexity terms. Logarithms are base 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params {
    pub n: f64,
    pub k: f64,
    pub m: f64,
    pub s: f64,
    pub t: f64,
    pub r: f64,
    /// Value substituted for the `C(ε)` symbol.
    pub algo: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            n: 2.0,
            k: 1.0,
            m: 1.0,
            s: 1.0,
            t: 1.0,
            r: 1.0,
            algo: 1.0,
        }
    }
}

impl Params {
    pub fn with_n(mut self, n: f64) -> Self {
        self.n = n;
        self
    }
    pub fn with_k(mut self, k: f64) -> Self {
        self.k = k;
        self
    }
    pub fn with_m(mut self, m: f64) -> Self {
        self.m = m;
        self
    }
    pub fn with_s(mut self, s: f64) -> Self {
        self.s = s;
        self
    }
    pub fn with_t(mut self, t: f64) -> Self {
        self.t = t;
        self
    }
    pub fn with_r(mut self, r: f64) -> Self {
        self.r = r;
        self
    }
    pub fn with_algo(mut self, algo: f64) -> Self {
        self.algo = algo;
        self
    }

    fn value_of(&self, f: Factor) -> f64 {
        match f {
            Factor::Algo => self.algo,
            Factor::R => self.r,
            Factor::S => self.s,
            Factor::T => self.t,
            Factor::K => self.k,
            Factor::LogK => self.k.log2(),
            Factor::LogK1 => (self.k + 1.0).log2(),
            Factor::M => self.m,
            Factor::SqrtN => self.n.sqrt(),
            Factor::N => self.n,
            Factor::LogN => self.n.log2(),
        }
    }
}

/// Sum of monomials with real coefficients, kept in canonical order with
/// like terms collected.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ComplexityTerm {
    terms: Vec<(f64, Monomial)>,
}

impl ComplexityTerm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::from_terms(vec![(c, Monomial::default())])
    }

    pub fn monomial(coef: f64, factors: &[(Factor, u32)]) -> Self {
        Self::from_terms(vec![(coef, Monomial::new(factors))])
    }

    /// The abstract processing cost `C(ε)`.
    pub fn algorithm() -> Self {
        Self::monomial(1.0, &[(Factor::Algo, 1)])
    }

    pub fn from_terms(terms: Vec<(f64, Monomial)>) -> Self {
        let mut collected: BTreeMap<Monomial, f64> = BTreeMap::new();
        for (c, m) in terms {
            *collected.entry(m).or_insert(0.0) += c;
        }
        let mut terms: Vec<(f64, Monomial)> = collected
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(m, c)| (c, m))
            .collect();
        terms.sort_by(|a, b| a.1.sort_key().cmp(&b.1.sort_key()).then(a.1.cmp(&b.1)));
        Self { terms }
    }

    pub fn terms(&self) -> &[(f64, Monomial)] {
        &self.terms
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.iter().map(|(_, m)| m)
    }

    pub fn is_one(&self) -> bool {
        matches!(self.terms.as_slice(), [(c, m)] if *c == 1.0 && m.is_constant())
    }

    pub fn evaluate(&self, p: &Params) -> f64 {
        self.terms.iter().map(|(c, m)| c * m.evaluate(p)).sum()
    }

    /// Rendering with coefficients dropped and duplicate monomials merged,
    /// as an asymptotic order reads.
    pub fn order_string(&self) -> String {
        render(self.terms.iter().map(|(_, m)| m.to_string()))
    }
}

fn render(parts: impl Iterator<Item = String>) -> String {
    let parts: Vec<String> = parts.collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

impl fmt::Display for ComplexityTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.terms.iter().map(|(c, m)| {
            if *c == 1.0 {
                m.to_string()
            } else if m.is_constant() {
                format!("{c}")
            } else {
                format!("{c}·{m}")
            }
        });
        write!(f, "{}", render(parts))
    }
}

impl Serialize for ComplexityTerm {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl Add for &ComplexityTerm {
    type Output = ComplexityTerm;

    fn add(self, rhs: &ComplexityTerm) -> ComplexityTerm {
        ComplexityTerm::from_terms(self.terms.iter().chain(&rhs.terms).cloned().collect())
    }
}

impl Add for ComplexityTerm {
    type Output = ComplexityTerm;

    fn add(self, rhs: ComplexityTerm) -> ComplexityTerm {
        &self + &rhs
    }
}

impl Mul for &ComplexityTerm {
    type Output = ComplexityTerm;

    fn mul(self, rhs: &ComplexityTerm) -> ComplexityTerm {
        let mut out = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (a, ma) in &self.terms {
            for (b, mb) in &rhs.terms {
                out.push((a * b, ma * mb));
            }
        }
        ComplexityTerm::from_terms(out)
    }
}

impl Mul for ComplexityTerm {
    type Output = ComplexityTerm;

    fn mul(self, rhs: ComplexityTerm) -> ComplexityTerm {
        &self * &rhs
    }
}
