//! The tropical vertex model on a finite window.
//!
//! Vertices sit at integer points `(s, t)`, `0 <= s < cols`, `0 <= t < rows`,
//! with `s` growing eastward and `t` southward. Each vertex reads its west and
//! north edges `(x, y)` and writes `R(x, y) = (x', y')` to its south and east
//! edges. Row `t` carries the line parameter `L(t)`, column `s` carries `K(s)`.

use crate::bilinear::{build_element, TauData};
use crate::crystal::{level, same_shape, CrystalElement, Family};
use crate::error::{Error, Result};
use crate::fermion::{assign_finite, FermionParams, GridSpec, TimeArray, VertexTimes, Domain};
use crate::numerics::{relative_gap, ComplexField, Field, Semifield};
use crate::tropical_r::{check_ybe, r_apply, Triple};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// West edges, one per row, and north edges, one per column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "CrystalElement<S>: Serialize", deserialize = "CrystalElement<S>: Deserialize<'de>"))]
pub struct Boundary<S> {
    pub west: Vec<CrystalElement<S>>,
    pub north: Vec<CrystalElement<S>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeId {
    /// Horizontal edge on row `t` west of column `s`; `s = cols` is the east boundary.
    H { s: usize, t: usize },
    /// Vertical edge on column `s` north of row `t`; `t = rows` is the south boundary.
    V { s: usize, t: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    AntiDiagonal,
    ColumnMajor,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "CrystalElement<S>: Serialize"))]
pub struct LatticeState<S> {
    pub cols: usize,
    pub rows: usize,
    /// `h[t][s]`, `0 <= s <= cols`.
    pub h: Vec<Vec<CrystalElement<S>>>,
    /// `v[s][t]`, `0 <= t <= rows`.
    pub v: Vec<Vec<CrystalElement<S>>>,
}

impl<S: Semifield> LatticeState<S> {
    pub fn edge(&self, id: EdgeId) -> &CrystalElement<S> {
        match id {
            EdgeId::H { s, t } => &self.h[t][s],
            EdgeId::V { s, t } => &self.v[s][t],
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &CrystalElement<S>)> {
        let h = self.h.iter().enumerate().flat_map(|(t, row)| row.iter().enumerate().map(move |(s, e)| (EdgeId::H { s, t }, e)));
        let v = self.v.iter().enumerate().flat_map(|(s, col)| col.iter().enumerate().map(move |(t, e)| (EdgeId::V { s, t }, e)));
        h.chain(v)
    }

    pub fn boundary(&self) -> Boundary<S> {
        Boundary { west: self.h.iter().map(|row| row[0].clone()).collect(), north: self.v.iter().map(|col| col[0].clone()).collect() }
    }

    /// `(x, y, x', y')` = (west, north, south, east) edges of a vertex.
    pub fn vertex(&self, s: usize, t: usize) -> [&CrystalElement<S>; 4] {
        [&self.h[t][s], &self.v[s][t], &self.v[s][t + 1], &self.h[t][s + 1]]
    }

    /// Vertices where `R(x, y) != (x', y')` exactly.
    pub fn vertex_defects(&self) -> Result<Vec<(usize, usize)>> {
        let mut bad = Vec::new();
        for t in 0..self.rows {
            for s in 0..self.cols {
                let [x, y, xp, yp] = self.vertex(s, t);
                let r = r_apply(x, y)?;
                if r.x != *xp || r.y != *yp {
                    bad.push((s, t));
                }
            }
        }
        Ok(bad)
    }

    /// Edges whose element differs from the same edge of `other`.
    pub fn mismatches(&self, other: &Self) -> Vec<EdgeId> {
        if (self.cols, self.rows) != (other.cols, other.rows) {
            return self.edges().map(|(id, _)| id).collect();
        }
        self.edges().filter(|(id, e)| other.edge(*id) != *e).map(|(id, _)| id).collect()
    }
}

impl<F: Field> LatticeState<F> {
    /// Largest relative coordinate gap between `R(x, y)` and `(x', y')`.
    pub fn max_vertex_residual(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for t in 0..self.rows {
            for s in 0..self.cols {
                let [x, y, xp, yp] = self.vertex(s, t);
                let r = r_apply(x, y)?;
                let pairs = r.x.coords().iter().zip(xp.coords()).chain(r.y.coords().iter().zip(yp.coords()));
                worst = pairs.fold(worst, |w, (a, b)| w.max(relative_gap(a, b)));
            }
        }
        Ok(worst)
    }
}

fn at_vertex(s: usize, t: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::SingularInput(m) => Error::SingularInput(format!("{m} at vertex ({s}, {t})")),
        other => other,
    }
}

/// Fills the window from its west and north boundary by an anti-diagonal sweep.
pub fn evolve<S: Semifield>(boundary: &Boundary<S>) -> Result<LatticeState<S>> {
    evolve_with(boundary, Schedule::AntiDiagonal)
}

pub fn evolve_with<S: Semifield>(boundary: &Boundary<S>, schedule: Schedule) -> Result<LatticeState<S>> {
    let (rows, cols) = (boundary.west.len(), boundary.north.len());
    let first = boundary.west.first().or(boundary.north.first()).ok_or_else(|| Error::BadShape("empty window".into()))?;
    if rows == 0 || cols == 0 {
        return Err(Error::BadShape("window needs at least one row and one column".into()));
    }
    if first.family() == Family::A1 {
        return Err(Error::WrongFamily { expected: "D1, A2 or C1".into(), found: first.family().name().into() });
    }
    for e in boundary.west.iter().chain(&boundary.north) {
        same_shape(first, e)?;
    }
    let mut h: Vec<Vec<Option<CrystalElement<S>>>> = boundary.west.iter().map(|w| {
        let mut row = vec![None; cols + 1];
        row[0] = Some(w.clone());
        row
    }).collect();
    let mut v: Vec<Vec<Option<CrystalElement<S>>>> = boundary.north.iter().map(|n| {
        let mut col = vec![None; rows + 1];
        col[0] = Some(n.clone());
        col
    }).collect();
    let step = |s: usize, t: usize, x: &CrystalElement<S>, y: &CrystalElement<S>| r_apply(x, y).map_err(at_vertex(s, t));
    match schedule {
        Schedule::AntiDiagonal => {
            for d in 0..rows + cols - 1 {
                let front: Vec<(usize, usize)> =
                    (0..cols).filter_map(|s| d.checked_sub(s).filter(|&t| t < rows).map(|t| (s, t))).collect();
                let out: Vec<_> = front
                    .par_iter()
                    .map(|&(s, t)| step(s, t, h[t][s].as_ref().expect("west input set"), v[s][t].as_ref().expect("north input set")))
                    .collect();
                for (&(s, t), r) in front.iter().zip(out) {
                    let r = r?;
                    v[s][t + 1] = Some(r.x);
                    h[t][s + 1] = Some(r.y);
                }
            }
        }
        Schedule::ColumnMajor => {
            for s in 0..cols {
                for t in 0..rows {
                    let r = step(s, t, h[t][s].as_ref().expect("west input set"), v[s][t].as_ref().expect("north input set"))?;
                    v[s][t + 1] = Some(r.x);
                    h[t][s + 1] = Some(r.y);
                }
            }
        }
    }
    let unwrap = |m: Vec<Vec<Option<CrystalElement<S>>>>| m.into_iter().map(|r| r.into_iter().map(|e| e.expect("every edge is set")).collect()).collect();
    Ok(LatticeState { cols, rows, h: unwrap(h), v: unwrap(v) })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelReport<S> {
    /// Level of the west boundary edge of each row.
    pub rows: Vec<S>,
    /// Level of the north boundary edge of each column.
    pub cols: Vec<S>,
    /// Edges whose level differs from the rest of their line.
    pub violations: Vec<EdgeId>,
}

impl<S> LevelReport<S> {
    pub fn constant(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Levels along every row and column of an evolved state.
pub fn line_levels<S: Semifield>(state: &LatticeState<S>) -> Result<LevelReport<S>> {
    let mut violations = Vec::new();
    let mut rows = Vec::with_capacity(state.rows);
    for (t, row) in state.h.iter().enumerate() {
        let l = level(&row[0])?;
        for (s, e) in row.iter().enumerate() {
            if level(e)? != l {
                violations.push(EdgeId::H { s, t });
            }
        }
        rows.push(l);
    }
    let mut cols = Vec::with_capacity(state.cols);
    for (s, col) in state.v.iter().enumerate() {
        let k = level(&col[0])?;
        for (t, e) in col.iter().enumerate() {
            if level(e)? != k {
                violations.push(EdgeId::V { s, t });
            }
        }
        cols.push(k);
    }
    Ok(LevelReport { rows, cols, violations })
}

/// Line parameters and times of a tau field. Faces are addressed by doubled
/// coordinates `(2s, 2t)`, so vertex `(s, t)` owns `(2s, 2t)` and its eight
/// neighbours at offsets of one.
#[derive(Clone, Debug)]
pub struct TauFieldSpec<C> {
    pub n: usize,
    /// `K(s)` per column.
    pub big_k: Vec<C>,
    /// `L(t)` per row.
    pub big_l: Vec<C>,
    /// `a_2..a_{n-1}`.
    pub a: Vec<C>,
    /// Odd time of the northwest corner face `(-1, -1)`.
    pub base: TimeArray<C>,
    pub y: TimeArray<C>,
}

impl<C: Field> TauFieldSpec<C> {
    pub fn cols(&self) -> usize {
        self.big_k.len()
    }

    pub fn rows(&self) -> usize {
        self.big_l.len()
    }

    /// Time of face `(s2, t2)`: crossing column `s'` eastward adds
    /// `eps~(1/K(s'))` then `eps(1/K(s'))`; crossing row `t'` southward
    /// subtracts `eps(1/L(t'))` then `eps~(1/L(t'))`.
    pub fn face_time(&self, s2: i64, t2: i64) -> TimeArray<C> {
        let inv = |v: &C| C::one() / v.clone();
        let mut x = self.base.clone();
        for (s, k) in self.big_k.iter().enumerate() {
            let s = 2 * s as i64;
            if s <= s2 {
                x = x + TimeArray::eps_tilde(inv(k));
            }
            if s < s2 {
                x = x + TimeArray::eps(inv(k));
            }
        }
        for (t, l) in self.big_l.iter().enumerate() {
            let t = 2 * t as i64;
            if t <= t2 {
                x = x - TimeArray::eps(inv(l));
            }
            if t < t2 {
                x = x - TimeArray::eps_tilde(inv(l));
            }
        }
        x
    }

    /// The single-vertex data of `(s, t)`, with `eta` the time of its northeast face.
    pub fn grid(&self, s: usize, t: usize) -> Result<GridSpec<C>> {
        let eta = self.face_time(2 * s as i64 + 1, 2 * t as i64 - 1);
        GridSpec::new(self.n, self.big_k[s].clone(), self.big_l[t].clone(), self.a.clone())?.with_times(eta, self.y.clone())
    }
}

/// Offsets of the nine faces around a vertex, indexed like [`Domain`].
const OFFSETS: [(i64, i64); 9] = [(0, 0), (1, -1), (-1, -1), (-1, 1), (1, 1), (0, -1), (0, 1), (-1, 0), (1, 0)];

#[derive(Clone, Debug)]
pub struct FaceTauField<C> {
    pub spec: TauFieldSpec<C>,
    /// Values keyed by doubled coordinates. Faces with `s2 + t2` odd hold
    /// components `1..=n-2`; the others hold `0..=n`.
    pub faces: BTreeMap<(i64, i64), Vec<C>>,
}

impl<C: Field> FaceTauField<C> {
    fn face(&self, s2: i64, t2: i64) -> Result<&Vec<C>> {
        self.faces.get(&(s2, t2)).ok_or_else(|| Error::BadShape(format!("face ({s2}, {t2}) outside the window")))
    }

    /// The bilinear data around vertex `(s, t)`, read back from the faces.
    pub fn vertex_data(&self, s: usize, t: usize) -> Result<TauData<C>> {
        let g = self.spec.grid(s, t)?;
        let (s2, t2) = (2 * s as i64, 2 * t as i64);
        let at = |d: Domain| {
            let (ds, dt) = OFFSETS[d as usize];
            self.face(s2 + ds, t2 + dt).cloned()
        };
        let tau = (0..5).map(|j| at(Domain::corner(j))).collect::<Result<Vec<_>>>()?;
        Ok(TauData {
            n: g.n,
            lambda: g.lambda()?,
            kappa: g.kappa()?,
            s: at(Domain::S)?,
            w: at(Domain::W)?,
            north: at(Domain::N)?,
            east: at(Domain::E)?,
            tau,
            alpha: g.big_k.clone() - g.big_l.clone(),
            beta: g.big_k + g.big_l,
        })
    }

    /// Largest relative residual of the bilinear equations around each vertex.
    pub fn residuals(&self) -> Result<Vec<((usize, usize), f64)>> {
        let mut out = Vec::new();
        for t in 0..self.spec.rows() {
            for s in 0..self.spec.cols() {
                out.push(((s, t), self.vertex_data(s, t)?.max_relative_residual()?));
            }
        }
        Ok(out)
    }

    /// Vertices where some bilinear equation fails.
    pub fn failing_vertices(&self) -> Result<Vec<(usize, usize)>> {
        let mut out = Vec::new();
        for t in 0..self.spec.rows() {
            for s in 0..self.spec.cols() {
                if !self.vertex_data(s, t)?.is_solution()? {
                    out.push((s, t));
                }
            }
        }
        Ok(out)
    }

    /// Edge elements read off the faces: each edge is `[mu; tau, C, tau']`
    /// from the two corner faces at its ends and the edge face between them.
    pub fn edges(&self) -> Result<LatticeState<C>> {
        let (cols, rows) = (self.spec.cols(), self.spec.rows());
        let g = |s: usize, t: usize| self.spec.grid(s.min(cols - 1), t.min(rows - 1));
        let mut h = Vec::with_capacity(rows);
        for t in 0..rows {
            let lambda = g(0, t)?.lambda()?;
            let t2 = 2 * t as i64;
            let row = (0..=cols)
                .map(|s| {
                    let s2 = 2 * s as i64 - 1;
                    build_element(&lambda, self.face(s2, t2 + 1)?, self.face(s2, t2)?, self.face(s2, t2 - 1)?)
                })
                .collect::<Result<Vec<_>>>()?;
            h.push(row);
        }
        let mut v = Vec::with_capacity(cols);
        for s in 0..cols {
            let kappa = g(s, 0)?.kappa()?;
            let s2 = 2 * s as i64;
            let col = (0..=rows)
                .map(|t| {
                    let t2 = 2 * t as i64 - 1;
                    build_element(&kappa, self.face(s2 - 1, t2)?, self.face(s2, t2)?, self.face(s2 + 1, t2)?)
                })
                .collect::<Result<Vec<_>>>()?;
            v.push(col);
        }
        Ok(LatticeState { cols, rows, h, v })
    }

    /// `l_t` from the spectral element of each row against its closed form,
    /// then the same for `k_s`; `true` where they agree.
    pub fn line_level_checks(&self) -> Result<(Vec<bool>, Vec<bool>)> {
        let mut rows = Vec::new();
        for t in 0..self.spec.rows() {
            let g = self.spec.grid(0, t)?;
            rows.push(level(&g.lambda()?)? == g.line_level(&g.big_l));
        }
        let mut cols = Vec::new();
        for s in 0..self.spec.cols() {
            let g = self.spec.grid(s, 0)?;
            cols.push(level(&g.kappa()?)? == g.line_level(&g.big_k));
        }
        Ok((rows, cols))
    }

    /// Edges where evolving the extracted northwest boundary disagrees with
    /// the extracted lattice.
    pub fn evolve_mismatches(&self) -> Result<Vec<EdgeId>> {
        let extracted = self.edges()?;
        let evolved = evolve(&extracted.boundary())?;
        let mut bad = Vec::new();
        for (id, e) in extracted.edges() {
            let f = evolved.edge(id);
            let close = e.coords().iter().zip(f.coords()).all(|(a, b)| (a.clone() - b.clone()).negligible(&(a.abs_l1() + b.abs_l1())));
            if !close {
                bad.push(id);
            }
        }
        Ok(bad)
    }
}

/// Fills every face of the window from the fermionic construction at each
/// vertex. Faces shared by neighbouring vertices must receive the same value.
pub fn tau_field<C: ComplexField>(spec: &TauFieldSpec<C>, g: &FermionParams<C>) -> Result<FaceTauField<C>> {
    if spec.cols() == 0 || spec.rows() == 0 {
        return Err(Error::BadShape("window needs at least one row and one column".into()));
    }
    if !spec.base.is_odd() {
        return Err(Error::OddnessViolation);
    }
    let verts: Vec<(usize, usize)> = (0..spec.rows()).flat_map(|t| (0..spec.cols()).map(move |s| (s, t))).collect();
    let data: Vec<Result<TauData<C>>> = verts.par_iter().map(|&(s, t)| assign_finite(&spec.grid(s, t)?, g)).collect();
    let mut faces: BTreeMap<(i64, i64), Vec<C>> = BTreeMap::new();
    for (&(s, t), d) in verts.iter().zip(data) {
        let d = d?;
        let rows = [&d.tau[0], &d.tau[1], &d.tau[2], &d.tau[3], &d.tau[4], &d.north, &d.s, &d.w, &d.east];
        for ((ds, dt), vals) in OFFSETS.iter().zip(rows) {
            let key = (2 * s as i64 + ds, 2 * t as i64 + dt);
            match faces.get(&key) {
                Some(old) => {
                    let same = old.iter().zip(vals).all(|(a, b)| (a.clone() - b.clone()).negligible(&(a.abs_l1() + b.abs_l1())));
                    if !same {
                        return Err(Error::Internal(format!("face {key:?} assigned inconsistently at vertex ({s}, {t})")));
                    }
                }
                None => {
                    faces.insert(key, vals.clone());
                }
            }
        }
    }
    Ok(FaceTauField { spec: spec.clone(), faces })
}

/// Both sides of the braid relation built as three-line diagrams, with face
/// times carried along crossing by crossing.
#[derive(Clone, Debug)]
pub struct YbeComposition<S, C> {
    /// `R_1 R_2 R_1` applied to `(x, y, z)`, first crossing on lines 1 and 2.
    pub left: Triple<S>,
    pub right: Triple<S>,
    pub equal: bool,
    /// The seven incoming faces, left to right: region, line, region, ...
    pub input_faces: Vec<TimeArray<C>>,
    /// The five inner outgoing faces of each diagram.
    pub left_faces: Vec<TimeArray<C>>,
    pub right_faces: Vec<TimeArray<C>>,
    pub faces_equal: bool,
    /// Whether the result matches [`check_ybe`].
    pub agrees_with_check_ybe: bool,
}

struct Diagram<S, C> {
    elements: Vec<CrystalElement<S>>,
    params: Vec<C>,
    /// `regions[i]` lies left of line `i`; `lines[i]` is the face of line `i`.
    regions: Vec<TimeArray<C>>,
    lines: Vec<TimeArray<C>>,
}

impl<S: Semifield, C: Field> Diagram<S, C> {
    fn new(elements: Vec<CrystalElement<S>>, params: Vec<C>, base: &TimeArray<C>) -> Self {
        let mut regions = vec![base.clone()];
        let mut lines = Vec::new();
        for p in &params {
            let r = regions.last().expect("nonempty");
            let l = r + &TimeArray::eps_tilde(C::one() / p.clone());
            regions.push(&l + &TimeArray::eps(C::one() / p.clone()));
            lines.push(l);
        }
        Diagram { elements, params, regions, lines }
    }

    /// A vertex with line `i` as its west edge and line `i + 1` as its north edge.
    fn cross(&mut self, i: usize) -> Result<()> {
        let (l, k) = (&self.params[i], &self.params[i + 1]);
        let vt = VertexTimes::new(&self.regions[i + 2], k, l);
        let incoming = [(&self.regions[i], Domain::C3), (&self.lines[i], Domain::W), (&self.regions[i + 1], Domain::C2), (&self.lines[i + 1], Domain::N)];
        if incoming.iter().any(|(x, d)| *x != vt.get(*d)) {
            return Err(Error::Internal(format!("incoming face times disagree at crossing {i}")));
        }
        let r = r_apply(&self.elements[i], &self.elements[i + 1])?;
        self.elements[i] = r.x;
        self.elements[i + 1] = r.y;
        self.params.swap(i, i + 1);
        self.lines[i] = vt.get(Domain::S).clone();
        self.regions[i + 1] = vt.get(Domain::C4).clone();
        self.lines[i + 1] = vt.get(Domain::E).clone();
        Ok(())
    }

    fn inner_faces(&self) -> Vec<TimeArray<C>> {
        let m = self.lines.len();
        let mut out = Vec::new();
        for i in 0..m {
            out.push(self.lines[i].clone());
            if i + 1 < m {
                out.push(self.regions[i + 1].clone());
            }
        }
        out
    }

    fn triple(self) -> Triple<S> {
        let mut e = self.elements.into_iter();
        (e.next().expect("three lines"), e.next().expect("three lines"), e.next().expect("three lines"))
    }
}

/// `params` are the line parameters of `x`, `y`, `z`; `base` is the time of
/// the face left of all three lines.
pub fn ybe_composition<S: Semifield, C: Field>(
    x: &CrystalElement<S>,
    y: &CrystalElement<S>,
    z: &CrystalElement<S>,
    params: &[C; 3],
    base: &TimeArray<C>,
) -> Result<YbeComposition<S, C>> {
    if params.iter().any(|p| p.is_zero()) {
        return Err(Error::ZeroInput("line parameter".into()));
    }
    let start = || Diagram::new(vec![x.clone(), y.clone(), z.clone()], params.to_vec(), base);
    let mut left = start();
    let input_faces: Vec<TimeArray<C>> = {
        let mut f = Vec::new();
        for i in 0..3 {
            f.push(left.regions[i].clone());
            f.push(left.lines[i].clone());
        }
        f.push(left.regions[3].clone());
        f
    };
    for i in [0, 1, 0] {
        left.cross(i)?;
    }
    let mut right = start();
    for i in [1, 0, 1] {
        right.cross(i)?;
    }
    let (left_faces, right_faces) = (left.inner_faces(), right.inner_faces());
    let faces_equal = left_faces == right_faces && left.regions[0] == right.regions[0] && left.regions[3] == right.regions[3];
    let (left, right) = (left.triple(), right.triple());
    let reference = check_ybe(x, y, z)?;
    let agrees_with_check_ybe = reference.left == left && reference.right == right;
    Ok(YbeComposition { equal: left == right, left, right, input_faces, left_faces, right_faces, faces_equal, agrees_with_check_ybe })
}
