//! Crystal elements for the four families, the level, the involutions and the
//! embeddings of the reduced families into the D family.

use crate::error::{Error, Result};
use crate::numerics::{ScalarText, Semifield};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    A1,
    D1,
    A2,
    C1,
}

impl Family {
    pub fn coord_len(self, n: usize) -> usize {
        match self {
            Family::A1 => n,
            Family::D1 => 2 * n - 1,
            Family::A2 => 2 * n,
            Family::C1 => 2 * n + 1,
        }
    }

    pub fn min_rank(self) -> usize {
        match self {
            Family::A1 | Family::A2 => 2,
            Family::D1 => 3,
            Family::C1 => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::A1 => "A1",
            Family::D1 => "D1",
            Family::A2 => "A2",
            Family::C1 => "C1",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "A1" => Ok(Family::A1),
            "D1" => Ok(Family::D1),
            "A2" => Ok(Family::A2),
            "C1" => Ok(Family::C1),
            _ => Err(Error::Parse(s.to_string())),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A named coordinate: `X(i)` is `x_i`, `Bar(i)` is the barred `x_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    X(usize),
    Bar(usize),
}

/// Storage position of a named coordinate.
pub fn position(family: Family, n: usize, slot: Slot) -> Result<usize> {
    let (lo, hi, pos) = match (family, slot) {
        (Family::A1, Slot::X(i)) => (1, n, i.wrapping_sub(1)),
        (Family::D1, Slot::X(i)) => (1, n, i.wrapping_sub(1)),
        (Family::D1, Slot::Bar(i)) => (1, n - 1, (2 * n - 1).wrapping_sub(i)),
        (Family::A2, Slot::X(i)) => (1, n, i.wrapping_sub(1)),
        (Family::A2, Slot::Bar(i)) => (1, n, (2 * n).wrapping_sub(i)),
        (Family::C1, Slot::X(i)) => (0, n, i),
        (Family::C1, Slot::Bar(i)) => (1, n, (2 * n + 1).wrapping_sub(i)),
        (Family::A1, Slot::Bar(_)) => return Err(Error::BadShape("A1 has no barred coordinates".into())),
    };
    let i = match slot {
        Slot::X(i) | Slot::Bar(i) => i,
    };
    if i < lo || i > hi {
        return Err(Error::IndexOutOfRange { index: i, max: hi });
    }
    Ok(pos)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrystalElement<S> {
    family: Family,
    rank: usize,
    coords: Vec<S>,
}

impl<S: Semifield> CrystalElement<S> {
    pub fn new(family: Family, rank: usize, coords: Vec<S>) -> Result<Self> {
        if rank < family.min_rank() {
            return Err(Error::BadShape(format!("{family} needs rank >= {}", family.min_rank())));
        }
        if coords.len() != family.coord_len(rank) {
            return Err(Error::BadShape(format!(
                "{family} rank {rank} has {} coordinates, got {}",
                family.coord_len(rank),
                coords.len()
            )));
        }
        if let Some(k) = coords.iter().position(Semifield::is_null) {
            return Err(Error::ZeroCoordinate(k));
        }
        Ok(CrystalElement { family, rank, coords })
    }

    /// D-family element from `x_1..x_n` and barred `x_1..x_{n-1}` (in increasing index order).
    pub fn d1(x: Vec<S>, xbar: Vec<S>) -> Result<Self> {
        let n = x.len();
        if xbar.len() + 1 != n {
            return Err(Error::BadShape("need n-1 barred coordinates".into()));
        }
        let mut c = x;
        c.extend(xbar.into_iter().rev());
        Self::new(Family::D1, n, c)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<S> {
        self.coords
    }

    pub fn get(&self, slot: Slot) -> &S {
        &self.coords[position(self.family, self.rank, slot).expect("slot in range")]
    }

    pub fn x(&self, i: usize) -> &S {
        self.get(Slot::X(i))
    }

    pub fn xbar(&self, i: usize) -> &S {
        self.get(Slot::Bar(i))
    }

    /// Cyclic access for the A family: `x_{i mod n}` with indices in `1..=n`.
    pub fn xc(&self, i: isize) -> &S {
        let n = self.rank as isize;
        &self.coords[(i - 1).rem_euclid(n) as usize]
    }

    fn with(&self, updates: &[(Slot, S)]) -> Self {
        let mut c = self.coords.clone();
        for (slot, v) in updates {
            c[position(self.family, self.rank, *slot).expect("slot in range")] = v.clone();
        }
        CrystalElement { family: self.family, rank: self.rank, coords: c }
    }

    pub fn expect_family(&self, f: Family) -> Result<()> {
        if self.family == f {
            Ok(())
        } else {
            Err(Error::WrongFamily { expected: f.to_string(), found: self.family.to_string() })
        }
    }

    pub fn map<T: Semifield>(&self, f: impl Fn(&S) -> T) -> Result<CrystalElement<T>> {
        CrystalElement::new(self.family, self.rank, self.coords.iter().map(f).collect())
    }
}

pub fn same_shape<S: Semifield>(x: &CrystalElement<S>, y: &CrystalElement<S>) -> Result<()> {
    if x.family != y.family {
        return Err(Error::WrongFamily { expected: x.family.to_string(), found: y.family.to_string() });
    }
    if x.rank != y.rank {
        return Err(Error::BadShape(format!("ranks {} and {} differ", x.rank, y.rank)));
    }
    Ok(())
}

/// Product of all coordinates of a D-family element; reduced families are embedded first.
pub fn level<S: Semifield>(x: &CrystalElement<S>) -> Result<S> {
    match x.family {
        Family::D1 => Ok(S::oprod(x.coords.iter().cloned())),
        Family::A2 | Family::C1 => level(&embed(x)?),
        Family::A1 => Err(Error::WrongFamily { expected: "D1".into(), found: "A1".into() }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sigma {
    One,
    N,
    Star,
}

/// The single-element involutions `sigma_1` and `sigma_n`.
pub fn sigma<S: Semifield>(a: Sigma, x: &CrystalElement<S>) -> Result<CrystalElement<S>> {
    x.expect_family(Family::D1)?;
    let n = x.rank;
    match a {
        Sigma::One => Ok(x.with(&[(Slot::X(1), x.xbar(1).clone()), (Slot::Bar(1), x.x(1).clone())])),
        Sigma::N => {
            let xn = x.x(n);
            Ok(x.with(&[
                (Slot::X(n - 1), x.x(n - 1).otimes(xn)),
                (Slot::Bar(n - 1), x.xbar(n - 1).otimes(xn)),
                (Slot::X(n), xn.orecip()),
            ]))
        }
        Sigma::Star => Err(Error::BadShape("sigma_star acts on pairs".into())),
    }
}

/// The involutions on pairs; `sigma_1` and `sigma_n` act on both members.
pub fn sigma_pair<S: Semifield>(
    a: Sigma,
    x: &CrystalElement<S>,
    y: &CrystalElement<S>,
) -> Result<(CrystalElement<S>, CrystalElement<S>)> {
    same_shape(x, y)?;
    x.expect_family(Family::D1)?;
    match a {
        Sigma::One | Sigma::N => Ok((sigma(a, x)?, sigma(a, y)?)),
        Sigma::Star => {
            let n = x.rank;
            let swap = |from: &CrystalElement<S>| {
                let mut xs = Vec::with_capacity(n);
                let mut bars = Vec::with_capacity(n - 1);
                for i in 1..n {
                    xs.push(from.xbar(i).clone());
                }
                xs.push(from.x(n).clone());
                for i in 1..n {
                    bars.push(from.x(i).clone());
                }
                CrystalElement::d1(xs, bars)
            };
            Ok((swap(y)?, swap(x)?))
        }
    }
}

/// Embeds an A2 or C1 element into the D family.
pub fn embed<S: Semifield>(x: &CrystalElement<S>) -> Result<CrystalElement<S>> {
    let n = x.rank;
    match x.family {
        Family::A2 => {
            let mut c = x.coords[..n].to_vec();
            c.push(S::unit());
            c.extend_from_slice(&x.coords[n..]);
            CrystalElement::new(Family::D1, n + 1, c)
        }
        Family::C1 => {
            let mut c = x.coords[..=n].to_vec();
            c.push(S::unit());
            c.extend_from_slice(&x.coords[n + 1..]);
            c.push(x.coords[0].clone());
            CrystalElement::new(Family::D1, n + 2, c)
        }
        f => Err(Error::WrongFamily { expected: "A2 or C1".into(), found: f.to_string() }),
    }
}

/// Inverse of [`embed`]; fails with `ReductionViolated` off the image.
pub fn project<S: Semifield>(family: Family, d: &CrystalElement<S>) -> Result<CrystalElement<S>> {
    d.expect_family(Family::D1)?;
    let m = d.rank;
    let c = &d.coords;
    match family {
        Family::A2 => {
            let n = m - 1;
            if c[n] != S::unit() {
                return Err(Error::ReductionViolated);
            }
            let mut v = c[..n].to_vec();
            v.extend_from_slice(&c[n + 1..]);
            CrystalElement::new(Family::A2, n, v)
        }
        Family::C1 => {
            let n = m - 2;
            if c[n + 1] != S::unit() || c[0] != c[2 * m - 2] {
                return Err(Error::ReductionViolated);
            }
            let mut v = c[..=n].to_vec();
            v.extend_from_slice(&c[n + 2..2 * m - 2]);
            CrystalElement::new(Family::C1, n, v)
        }
        f => Err(Error::WrongFamily { expected: "A2 or C1".into(), found: f.to_string() }),
    }
}

/// Geometric Kashiwara operator on the A family: `x_i -> c x_i`, `x_{i+1} -> x_{i+1} / c`.
pub fn kashiwara_a<S: Semifield>(i: usize, c: &S, x: &CrystalElement<S>) -> Result<CrystalElement<S>> {
    x.expect_family(Family::A1)?;
    if c.is_null() {
        return Err(Error::ZeroScale);
    }
    let n = x.rank;
    let a = (i + n - 1) % n;
    let b = (a + 1) % n;
    let mut v = x.coords.clone();
    v[a] = v[a].otimes(c);
    v[b] = v[b].odiv(c);
    CrystalElement::new(Family::A1, n, v)
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    family: Family,
    n: usize,
    coords: Vec<String>,
}

impl<S: Semifield + ScalarText> Serialize for CrystalElement<S> {
    fn serialize<Se: Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        ElementJson { family: self.family, n: self.rank, coords: self.coords.iter().map(S::to_text).collect() }
            .serialize(s)
    }
}

impl<'de, S: Semifield + ScalarText> Deserialize<'de> for CrystalElement<S> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = ElementJson::deserialize(d)?;
        let coords = j.coords.iter().map(|t| S::from_text(t)).collect::<Result<Vec<_>>>().map_err(D::Error::custom)?;
        CrystalElement::new(j.family, j.n, coords).map_err(D::Error::custom)
    }
}
