//! Finite simplicial sets in Eilenberg-Zilber normal form.
//!
//! A simplex is a monotone surjection `[n] -> [m]` applied to a
//! nondegenerate `m`-simplex. Only nondegenerate simplices and their faces
//! are stored; everything else is computed by [`SSet::act`].

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fincat::{FinCat, FinFunctor, Mor, Obj};
use crate::search::Budget;
use crate::util::Dsu;

/// `sigma^* x` for the nondegenerate simplex `nd` of dimension `max(sigma)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Simplex {
    pub sigma: Vec<usize>,
    pub nd: usize,
}

impl Simplex {
    pub fn nondegenerate(m: usize, nd: usize) -> Simplex {
        Simplex { sigma: (0..=m).collect(), nd }
    }

    pub fn dim(&self) -> usize {
        self.sigma.len() - 1
    }

    /// Dimension of the underlying nondegenerate simplex.
    pub fn base_dim(&self) -> usize {
        *self.sigma.last().unwrap()
    }

    pub fn is_degenerate(&self) -> bool {
        self.dim() != self.base_dim()
    }

    /// Positions `j` with `sigma(j) = sigma(j + 1)`, increasing; the
    /// simplex is `s_{j_t} ... s_{j_1}` applied to the base.
    pub fn degeneracy_word(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&j| self.sigma[j] == self.sigma[j + 1]).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NdSimplex {
    pub name: String,
    /// `d_0 .. d_m` (empty in degree 0).
    pub faces: Vec<Simplex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SSet {
    pub name: String,
    /// Nondegenerate simplices by degree.
    pub nd: Vec<Vec<NdSimplex>>,
}

/// `delta_i: [n-1] -> [n]`.
fn face_map(n: usize, i: usize) -> Vec<usize> {
    (0..=n).filter(|&j| j != i).collect()
}

fn degeneracy_map(n: usize, i: usize) -> Vec<usize> {
    (0..=n + 1).map(|j| if j <= i { j } else { j - 1 }).collect()
}

/// Monotone surjections `[n] -> [m]`.
fn surjections(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    // Choose the m positions j in 0..n where sigma(j + 1) = sigma(j) + 1.
    fn rec(n: usize, m: usize, start: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if acc.len() == m {
            let mut s = vec![0usize; n + 1];
            for j in 1..=n {
                s[j] = s[j - 1] + usize::from(acc.contains(&(j - 1)));
            }
            out.push(s);
            return;
        }
        for j in start..n {
            acc.push(j);
            rec(n, m, j + 1, acc, out);
            acc.pop();
        }
    }
    if m <= n {
        rec(n, m, 0, &mut Vec::new(), &mut out);
    }
    out
}

impl SSet {
    pub fn dim(&self) -> usize {
        self.nd.len().saturating_sub(1)
    }

    pub fn count(&self, k: usize) -> usize {
        self.nd.get(k).map_or(0, |v| v.len())
    }

    pub fn counts(&self) -> Vec<usize> {
        self.nd.iter().map(|v| v.len()).collect()
    }

    /// `theta^* x` for a monotone `theta: [k] -> [dim x]`.
    pub fn act(&self, x: &Simplex, theta: &[usize]) -> Simplex {
        let comp: Vec<usize> = theta.iter().map(|&t| x.sigma[t]).collect();
        let m = x.base_dim();
        match (0..=m).find(|v| !comp.contains(v)) {
            None => Simplex { sigma: comp, nd: x.nd },
            Some(j) => {
                let z = &self.nd[m][x.nd].faces[j];
                let shifted: Vec<usize> = comp.iter().map(|&v| if v > j { v - 1 } else { v }).collect();
                self.act(z, &shifted)
            }
        }
    }

    pub fn face(&self, x: &Simplex, i: usize) -> Simplex {
        self.act(x, &face_map(x.dim(), i))
    }

    pub fn degeneracy(&self, x: &Simplex, i: usize) -> Simplex {
        self.act(x, &degeneracy_map(x.dim(), i))
    }

    /// Vertices of a simplex, as indices of nondegenerate 0-simplices.
    pub fn vertices(&self, x: &Simplex) -> Vec<usize> {
        (0..=x.dim()).map(|j| self.act(x, &[j]).nd).collect()
    }

    /// Every simplex of degree `k`.
    pub fn simplices(&self, k: usize) -> Vec<Simplex> {
        let mut out = Vec::new();
        for m in 0..=k.min(self.dim()) {
            for s in surjections(k, m) {
                for id in 0..self.count(m) {
                    out.push(Simplex { sigma: s.clone(), nd: id });
                }
            }
        }
        out
    }

    pub fn show(&self, x: &Simplex) -> String {
        let mut s = self.nd[x.base_dim()][x.nd].name.clone();
        for j in x.degeneracy_word() {
            s = format!("s{j}({s})");
        }
        s
    }

    /// Face arities and the identities `d_i d_j = d_{j-1} d_i` (`i < j`)
    /// on every nondegenerate simplex.
    pub fn check(&self) -> std::result::Result<(), String> {
        for (m, level) in self.nd.iter().enumerate() {
            for y in level {
                if m == 0 {
                    if !y.faces.is_empty() {
                        return Err(format!("vertex {} has faces", y.name));
                    }
                    continue;
                }
                if y.faces.len() != m + 1 {
                    return Err(format!("{} needs {} faces", y.name, m + 1));
                }
                for z in &y.faces {
                    let ok = z.dim() + 1 == m && z.base_dim() <= z.dim() && z.nd < self.count(z.base_dim());
                    let mono = z.sigma.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1) && z.sigma[0] == 0;
                    if !ok || !mono {
                        return Err(format!("{} has an ill-formed face", y.name));
                    }
                }
                for j in 0..=m {
                    for i in 0..j {
                        if m < 2 {
                            continue;
                        }
                        let a = self.act(&y.faces[j], &face_map(m - 1, i));
                        let b = self.act(&y.faces[i], &face_map(m - 1, j - 1));
                        if a != b {
                            return Err(format!("d{i} d{j} != d{} d{i} on {}", j - 1, y.name));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// All simplicial identities on the simplices of degree `<= up_to`.
    pub fn check_identities(&self, up_to: usize) -> std::result::Result<(), String> {
        for n in 0..=up_to {
            for x in self.simplices(n) {
                for j in 0..=n {
                    let sj = self.degeneracy(&x, j);
                    if self.face(&sj, j) != x || self.face(&sj, j + 1) != x {
                        return Err(format!("d s = id fails on {}", self.show(&x)));
                    }
                    for i in 0..=j {
                        let si = self.degeneracy(&x, i);
                        if self.degeneracy(&sj, i) != self.degeneracy(&si, j + 1) {
                            return Err(format!("s{i} s{j} fails on {}", self.show(&x)));
                        }
                    }
                    if n >= 1 {
                        for i in 0..=n + 1 {
                            let lhs = self.face(&sj, i);
                            let rhs = if i < j {
                                self.degeneracy(&self.face(&x, i), j - 1)
                            } else if i > j + 1 {
                                self.degeneracy(&self.face(&x, i - 1), j)
                            } else {
                                x.clone()
                            };
                            if lhs != rhs {
                                return Err(format!("d{i} s{j} fails on {}", self.show(&x)));
                            }
                        }
                    }
                }
                if n >= 2 {
                    for j in 0..=n {
                        for i in 0..j {
                            let a = self.face(&self.face(&x, j), i);
                            let b = self.face(&self.face(&x, i), j - 1);
                            if a != b {
                                return Err(format!("d{i} d{j} fails on {}", self.show(&x)));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Keeps the marked nondegenerate simplices; the marking must be closed
    /// under faces. Returns the subcomplex and its inclusion.
    pub fn restrict(&self, name: &str, keep: &[Vec<bool>]) -> Result<(SSet, SMap)> {
        let mut newid: Vec<Vec<Option<usize>>> = Vec::new();
        for (k, level) in self.nd.iter().enumerate() {
            let mut c = 0;
            newid.push(
                (0..level.len())
                    .map(|i| {
                        if keep[k][i] {
                            c += 1;
                            Some(c - 1)
                        } else {
                            None
                        }
                    })
                    .collect(),
            );
        }
        let mut nd = Vec::new();
        for (k, level) in self.nd.iter().enumerate() {
            let mut out = Vec::new();
            for (i, y) in level.iter().enumerate() {
                if !keep[k][i] {
                    continue;
                }
                let mut faces = Vec::new();
                for z in &y.faces {
                    let id = newid[z.base_dim()][z.nd]
                        .ok_or_else(|| Error::Input(format!("face of {} is not kept", y.name)))?;
                    faces.push(Simplex { sigma: z.sigma.clone(), nd: id });
                }
                out.push(NdSimplex { name: y.name.clone(), faces });
            }
            nd.push(out);
        }
        while nd.len() > 1 && nd.last().unwrap().is_empty() {
            nd.pop();
        }
        let sub = SSet { name: name.to_string(), nd };
        let images = sub
            .nd
            .iter()
            .enumerate()
            .map(|(k, level)| {
                let olds: Vec<usize> = (0..self.count(k)).filter(|&i| keep[k][i]).collect();
                (0..level.len()).map(|i| Simplex::nondegenerate(k, olds[i])).collect()
            })
            .collect();
        Ok((sub, SMap { images }))
    }

    fn find_name(&self, name: &str) -> Option<Simplex> {
        for (k, level) in self.nd.iter().enumerate() {
            if let Some(i) = level.iter().position(|y| y.name == name) {
                return Some(Simplex::nondegenerate(k, i));
            }
        }
        None
    }
}

/// Images of the nondegenerate simplices; the rest follows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SMap {
    pub images: Vec<Vec<Simplex>>,
}

impl SMap {
    pub fn identity(x: &SSet) -> SMap {
        SMap {
            images: x
                .nd
                .iter()
                .enumerate()
                .map(|(k, l)| (0..l.len()).map(|i| Simplex::nondegenerate(k, i)).collect())
                .collect(),
        }
    }

    pub fn apply(&self, tgt: &SSet, x: &Simplex) -> Simplex {
        tgt.act(&self.images[x.base_dim()][x.nd], &x.sigma)
    }

    /// `self` after `first`.
    pub fn after(&self, mid: &SSet, tgt: &SSet, first: &SMap) -> SMap {
        let _ = mid;
        SMap { images: first.images.iter().map(|l| l.iter().map(|x| self.apply(tgt, x)).collect()).collect() }
    }
}

/// Dimensions and compatibility with every face of every nondegenerate simplex.
pub fn validate_smap(src: &SSet, tgt: &SSet, f: &SMap) -> std::result::Result<(), String> {
    if f.images.len() != src.nd.len() {
        return Err("wrong number of degrees".into());
    }
    for (k, level) in src.nd.iter().enumerate() {
        if f.images[k].len() != level.len() {
            return Err(format!("wrong number of images in degree {k}"));
        }
        for (i, y) in level.iter().enumerate() {
            let fy = &f.images[k][i];
            if fy.dim() != k || fy.base_dim() > tgt.dim() || fy.nd >= tgt.count(fy.base_dim()) {
                return Err(format!("image of {} is ill-formed", y.name));
            }
            for (j, z) in y.faces.iter().enumerate() {
                if tgt.face(fy, j) != f.apply(tgt, z) {
                    return Err(format!("map does not commute with d{j} on {}", y.name));
                }
            }
        }
    }
    Ok(())
}

/// Degreewise injectivity for degrees `<= up_to`.
pub fn is_mono(src: &SSet, tgt: &SSet, f: &SMap, up_to: usize) -> bool {
    (0..=up_to).all(|k| {
        let xs = src.simplices(k);
        let imgs: BTreeSet<Simplex> = xs.iter().map(|x| f.apply(tgt, x)).collect();
        imgs.len() == xs.len()
    })
}

fn subset_name(s: &[usize], n: usize) -> String {
    if n < 10 {
        s.iter().map(|v| v.to_string()).collect()
    } else {
        s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// `Delta^n`: nondegenerate simplices are the nonempty subsets of `[n]`.
pub fn standard_simplex(n: usize) -> SSet {
    let mut nd: Vec<Vec<NdSimplex>> = Vec::new();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    for k in 0..=n {
        let mut level = Vec::new();
        for s in subsets_of_size(n, k + 1) {
            let faces = if k == 0 {
                Vec::new()
            } else {
                (0..=k)
                    .map(|i| {
                        let mut t = s.clone();
                        t.remove(i);
                        Simplex::nondegenerate(k - 1, index[&t])
                    })
                    .collect()
            };
            level.push(NdSimplex { name: subset_name(&s, n), faces });
        }
        for (i, s) in subsets_of_size(n, k + 1).into_iter().enumerate() {
            index.insert(s, i);
        }
        nd.push(level);
    }
    SSet { name: format!("Delta{n}"), nd }
}

fn subsets_of_size(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << (n + 1)) {
        if mask.count_ones() as usize == size {
            out.push((0..=n).filter(|&v| mask & (1 << v) != 0).collect::<Vec<usize>>());
        }
    }
    out.sort();
    out
}

/// `dDelta^n`: everything but the top simplex.
pub fn boundary(n: usize) -> Result<(SSet, SMap)> {
    if n == 0 {
        return Err(Error::Input("the boundary of Delta0 is empty".into()));
    }
    let d = standard_simplex(n);
    let keep: Vec<Vec<bool>> = d.nd.iter().enumerate().map(|(k, l)| vec![k < n; l.len()]).collect();
    d.restrict(&format!("dDelta{n}"), &keep)
}

/// `Lambda^n_k`: the boundary without the face opposite `k`.
pub fn horn(n: usize, k: usize) -> Result<(SSet, SMap)> {
    if n == 0 || k > n {
        return Err(Error::Input(format!("horn Lambda{n}_{k} needs 0 <= k <= n, n >= 1")));
    }
    let d = standard_simplex(n);
    let opposite: Vec<usize> = (0..=n).filter(|&v| v != k).collect();
    let keep: Vec<Vec<bool>> =
        d.nd.iter()
            .enumerate()
            .map(|(deg, l)| {
                (0..l.len()).map(|i| deg < n - 1 || (deg == n - 1 && subsets_of_size(n, n)[i] != opposite)).collect()
            })
            .collect();
    d.restrict(&format!("Lambda{n}_{k}"), &keep)
}

pub fn point() -> SSet {
    standard_simplex(0)
}

/// Normal form of a string of arrows starting at `x0`.
fn string_normal_form(c: &FinCat, x0: Obj, arrows: &[Mor], index: &[HashMap<Vec<Mor>, usize>]) -> Simplex {
    let mut sigma = vec![0usize];
    let mut reduced = Vec::new();
    for &f in arrows {
        if c.is_identity(f) {
            sigma.push(*sigma.last().unwrap());
        } else {
            sigma.push(sigma.last().unwrap() + 1);
            reduced.push(f);
        }
    }
    let nd = if reduced.is_empty() { x0 } else { index[reduced.len()][&reduced] };
    Simplex { sigma, nd }
}

/// The nerve truncated at degree `trunc`: composable strings of
/// non-identity arrows, `d_0` and `d_n` drop an end, inner faces compose.
pub fn nerve(c: &FinCat, trunc: usize) -> SSet {
    let mut strings: Vec<Vec<Vec<Mor>>> = vec![c.objects().map(|_| Vec::new()).collect()];
    for k in 1..=trunc {
        let mut level = Vec::new();
        if k == 1 {
            level = c.morphisms().filter(|&f| !c.is_identity(f)).map(|f| vec![f]).collect();
        } else {
            for s in &strings[k - 1] {
                let last = *s.last().unwrap();
                for g in c.morphisms().filter(|&g| !c.is_identity(g) && c.dom(g) == c.cod(last)) {
                    let mut t = s.clone();
                    t.push(g);
                    level.push(t);
                }
            }
        }
        if level.is_empty() {
            break;
        }
        strings.push(level);
    }
    let index: Vec<HashMap<Vec<Mor>, usize>> =
        strings.iter().map(|l| l.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()).collect();
    let mut nd = Vec::new();
    for (k, level) in strings.iter().enumerate() {
        let mut out = Vec::new();
        for (i, s) in level.iter().enumerate() {
            if k == 0 {
                out.push(NdSimplex { name: c.object_name(i).to_string(), faces: Vec::new() });
                continue;
            }
            let x0 = c.dom(s[0]);
            let mut faces = Vec::new();
            for j in 0..=k {
                let (start, arrows): (Obj, Vec<Mor>) = if j == 0 {
                    (c.cod(s[0]), s[1..].to_vec())
                } else if j == k {
                    (x0, s[..k - 1].to_vec())
                } else {
                    let mut t = s[..j - 1].to_vec();
                    t.push(c.compose(s[j], s[j - 1]));
                    t.extend_from_slice(&s[j + 1..]);
                    (x0, t)
                };
                faces.push(string_normal_form(c, start, &arrows, &index));
            }
            let name = s.iter().map(|&f| c.mor_name(f)).collect::<Vec<_>>().join("|");
            out.push(NdSimplex { name, faces });
        }
        nd.push(out);
    }
    SSet { name: format!("N({})", c.name()), nd }
}

/// `N(F)`: a string goes to the string of images.
pub fn nerve_map(src: &FinCat, tgt: &FinCat, f: &FinFunctor, ns: &SSet, nt: &SSet) -> Result<SMap> {
    let index: Vec<HashMap<String, usize>> =
        nt.nd.iter().map(|l| l.iter().enumerate().map(|(i, y)| (y.name.clone(), i)).collect()).collect();
    let mut images = Vec::new();
    for (k, level) in ns.nd.iter().enumerate() {
        let mut out = Vec::new();
        for y in level {
            if k == 0 {
                let o = src.object_by_name(&y.name)?;
                out.push(Simplex::nondegenerate(0, f.omap[o]));
                continue;
            }
            let arrows: Vec<Mor> =
                y.name.split('|').map(|n| src.morphism_by_name(n).map(|m| f.mmap[m])).collect::<Result<_>>()?;
            let x0 = tgt.dom(arrows[0]);
            let mut sigma = vec![0usize];
            let mut reduced = Vec::new();
            for &a in &arrows {
                if tgt.is_identity(a) {
                    sigma.push(*sigma.last().unwrap());
                } else {
                    sigma.push(sigma.last().unwrap() + 1);
                    reduced.push(tgt.mor_name(a).to_string());
                }
            }
            let nd = if reduced.is_empty() {
                x0
            } else {
                *index
                    .get(reduced.len())
                    .and_then(|m| m.get(&reduced.join("|")))
                    .ok_or_else(|| Error::Input("target nerve is truncated below the image".into()))?
            };
            out.push(Simplex { sigma, nd });
        }
        images.push(out);
    }
    Ok(SMap { images })
}

fn mask_name(mask: u32, n: usize) -> String {
    let v: Vec<String> = (0..=n).filter(|&i| mask & (1 << i) != 0).map(|i| i.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

/// Strict chains of nonempty subsets of `[n]`, by length.
fn strict_chains(n: usize) -> Vec<Vec<Vec<u32>>> {
    let full = (1u32 << (n + 1)) - 1;
    let mut subsets: Vec<u32> = (1..=full).collect();
    subsets.sort_by_key(|&m| (m.count_ones(), m.reverse_bits()));
    let mut levels: Vec<Vec<Vec<u32>>> = vec![subsets.iter().map(|&s| vec![s]).collect()];
    for k in 1..=n {
        let mut level = Vec::new();
        for c in &levels[k - 1] {
            let last = *c.last().unwrap();
            for &s in &subsets {
                if s != last && s & last == last {
                    let mut t = c.clone();
                    t.push(s);
                    level.push(t);
                }
            }
        }
        levels.push(level);
    }
    levels
}

/// `Sd Delta^n`: the nerve of the poset of nonempty subsets of `[n]`.
pub fn sd_standard(n: usize) -> SSet {
    let levels = strict_chains(n);
    let index: Vec<HashMap<Vec<u32>, usize>> =
        levels.iter().map(|l| l.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect()).collect();
    let nd = levels
        .iter()
        .enumerate()
        .map(|(k, l)| {
            l.iter()
                .map(|c| {
                    let faces = if k == 0 {
                        Vec::new()
                    } else {
                        (0..=k)
                            .map(|i| {
                                let mut t = c.clone();
                                t.remove(i);
                                Simplex::nondegenerate(k - 1, index[k - 1][&t])
                            })
                            .collect()
                    };
                    let name = c.iter().map(|&m| mask_name(m, n)).collect::<Vec<_>>().join("<");
                    NdSimplex { name, faces }
                })
                .collect()
        })
        .collect();
    SSet { name: format!("SdDelta{n}"), nd }
}

fn chain_normal_form(chain: &[u32], index: &[HashMap<Vec<u32>, usize>]) -> Simplex {
    let mut sigma = vec![0usize];
    let mut reduced = vec![chain[0]];
    for w in chain.windows(2) {
        if w[1] == w[0] {
            sigma.push(*sigma.last().unwrap());
        } else {
            sigma.push(sigma.last().unwrap() + 1);
            reduced.push(w[1]);
        }
    }
    Simplex { sigma, nd: index[reduced.len() - 1][&reduced] }
}

/// `Sd(theta): Sd Delta^m -> Sd Delta^n` for monotone `theta: [m] -> [n]`.
pub fn sd_of_monotone(m: usize, n: usize, theta: &[usize]) -> SMap {
    let src = strict_chains(m);
    let tgt = strict_chains(n);
    let index: Vec<HashMap<Vec<u32>, usize>> =
        tgt.iter().map(|l| l.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect()).collect();
    let image = |mask: u32| (0..=m).filter(|&i| mask & (1 << i) != 0).fold(0u32, |acc, i| acc | (1 << theta[i]));
    SMap {
        images: src
            .iter()
            .map(|l| {
                l.iter().map(|c| chain_normal_form(&c.iter().map(|&s| image(s)).collect::<Vec<_>>(), &index)).collect()
            })
            .collect(),
    }
}

/// `(m, id, chain)`: a weakly increasing chain in the `id`-th nondegenerate `m`-simplex.
type SdElem = (usize, usize, Vec<u32>);

/// `Sd X`: copies of `Sd Delta^m`, one per nondegenerate simplex, glued
/// degreewise along every face relation `d_i y = sigma^* z` (degenerate
/// faces included, so this is the full colimit).
pub fn sd(x: &SSet) -> SSet {
    let top = x.dim();
    // Elements in degree k: (m, id, weakly increasing chain of length k + 1).
    let mut elems: Vec<Vec<SdElem>> = vec![Vec::new(); top + 1];
    let mut index: Vec<HashMap<SdElem, usize>> = vec![HashMap::new(); top + 1];
    for k in 0..=top {
        for (m, level) in x.nd.iter().enumerate() {
            for id in 0..level.len() {
                for c in weak_chains(m, k) {
                    index[k].insert((m, id, c.clone()), elems[k].len());
                    elems[k].push((m, id, c));
                }
            }
        }
    }
    let mut dsu: Vec<Dsu> = elems.iter().map(|e| Dsu::new(e.len())).collect();
    for (m, level) in x.nd.iter().enumerate().skip(1) {
        for (id, y) in level.iter().enumerate() {
            for (i, z) in y.faces.iter().enumerate() {
                let delta = face_map(m, i);
                let zm = z.base_dim();
                for k in 0..=top {
                    for c in weak_chains(m - 1, k) {
                        let up: Vec<u32> = c.iter().map(|&s| push_mask(s, &delta)).collect();
                        let down: Vec<u32> = c.iter().map(|&s| push_mask(s, &z.sigma)).collect();
                        let a = index[k][&(m, id, up)];
                        let b = index[k][&(zm, z.nd, down)];
                        dsu[k].union(a, b);
                    }
                }
            }
        }
    }
    // Nondegenerate classes: no representative with a repeated subset.
    let mut degenerate: Vec<Vec<bool>> = Vec::new();
    for k in 0..=top {
        let mut d = vec![false; elems[k].len()];
        for (e, (_, _, c)) in elems[k].iter().enumerate() {
            if c.windows(2).any(|w| w[0] == w[1]) {
                d[dsu[k].find(e)] = true;
            }
        }
        degenerate.push(d);
    }
    let mut ndid: Vec<HashMap<usize, usize>> = vec![HashMap::new(); top + 1];
    let mut reps: Vec<Vec<usize>> = vec![Vec::new(); top + 1];
    for k in 0..=top {
        for e in 0..elems[k].len() {
            let r = dsu[k].find(e);
            if r == e && !degenerate[k][r] {
                ndid[k].insert(r, reps[k].len());
                reps[k].push(e);
            }
        }
    }
    fn normal(
        k: usize,
        e: usize,
        elems: &[Vec<SdElem>],
        index: &[HashMap<SdElem, usize>],
        dsu: &mut [Dsu],
        ndid: &[HashMap<usize, usize>],
    ) -> Simplex {
        let r = dsu[k].find(e);
        if let Some(&id) = ndid[k].get(&r) {
            return Simplex::nondegenerate(k, id);
        }
        let rep = (0..elems[k].len())
            .find(|&f| dsu[k].find(f) == r && elems[k][f].2.windows(2).any(|w| w[0] == w[1]))
            .expect("degenerate class has a degenerate member");
        let (m, id, c) = &elems[k][rep];
        let mut sigma = vec![0usize];
        let mut reduced = vec![c[0]];
        for w in c.windows(2) {
            if w[1] == w[0] {
                sigma.push(*sigma.last().unwrap());
            } else {
                sigma.push(sigma.last().unwrap() + 1);
                reduced.push(w[1]);
            }
        }
        let k2 = reduced.len() - 1;
        let e2 = index[k2][&(*m, *id, reduced)];
        let inner = normal(k2, e2, elems, index, dsu, ndid);
        Simplex { sigma: sigma.iter().map(|&j| inner.sigma[j]).collect(), nd: inner.nd }
    }
    let mut nd = Vec::new();
    for k in 0..=top {
        let mut level = Vec::new();
        for &e in &reps[k].clone() {
            let (m, id, c) = elems[k][e].clone();
            let faces = if k == 0 {
                Vec::new()
            } else {
                (0..=k)
                    .map(|i| {
                        let mut t = c.clone();
                        t.remove(i);
                        let f = index[k - 1][&(m, id, t)];
                        normal(k - 1, f, &elems, &index, &mut dsu, &ndid)
                    })
                    .collect()
            };
            let name =
                format!("{}:{}", x.nd[m][id].name, c.iter().map(|&s| mask_name(s, m)).collect::<Vec<_>>().join("<"));
            level.push(NdSimplex { name, faces });
        }
        if level.is_empty() && k > 0 {
            break;
        }
        nd.push(level);
    }
    SSet { name: format!("Sd({})", x.name), nd }
}

fn push_mask(mask: u32, theta: &[usize]) -> u32 {
    (0..theta.len()).filter(|&i| mask & (1 << i) != 0).fold(0u32, |acc, i| acc | (1 << theta[i]))
}

/// Weakly increasing chains of `k + 1` nonempty subsets of `[m]`.
fn weak_chains(m: usize, k: usize) -> Vec<Vec<u32>> {
    let full = (1u32 << (m + 1)) - 1;
    let mut out: Vec<Vec<u32>> = (1..=full).map(|s| vec![s]).collect();
    for _ in 0..k {
        let mut next = Vec::new();
        for c in &out {
            let last = *c.last().unwrap();
            for s in 1..=full {
                if s & last == last {
                    let mut t = c.clone();
                    t.push(s);
                    next.push(t);
                }
            }
        }
        out = next;
    }
    out
}

/// Every simplicial map `src -> tgt`, by backtracking over the
/// nondegenerate simplices of `src` in degree order.
pub fn enumerate_smaps(src: &SSet, tgt: &SSet, budget: &Budget) -> Result<Vec<SMap>> {
    let order: Vec<(usize, usize)> =
        src.nd.iter().enumerate().flat_map(|(k, l)| (0..l.len()).map(move |i| (k, i))).collect();
    let pools: Vec<Vec<Simplex>> = (0..=src.dim()).map(|k| tgt.simplices(k)).collect();
    let mut images: Vec<Vec<Simplex>> = src.nd.iter().map(|l| vec![Simplex::nondegenerate(0, 0); l.len()]).collect();
    let mut out = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        pos: usize,
        order: &[(usize, usize)],
        src: &SSet,
        tgt: &SSet,
        pools: &[Vec<Simplex>],
        images: &mut Vec<Vec<Simplex>>,
        out: &mut Vec<SMap>,
        budget: &Budget,
    ) -> Result<()> {
        if pos == order.len() {
            out.push(SMap { images: images.clone() });
            return Ok(());
        }
        let (k, i) = order[pos];
        for cand in &pools[k] {
            budget.charge("simplicial map search", 1)?;
            let ok = src.nd[k][i].faces.iter().enumerate().all(|(j, z)| {
                let fz = tgt.act(&images[z.base_dim()][z.nd], &z.sigma);
                tgt.face(cand, j) == fz
            });
            if ok {
                images[k][i] = cand.clone();
                rec(pos + 1, order, src, tgt, pools, images, out, budget)?;
            }
        }
        Ok(())
    }
    rec(0, &order, src, tgt, &pools, &mut images, &mut out, budget)?;
    Ok(out)
}

/// `Ex(X)_n = Hom(Sd Delta^n, X)`.
pub fn ex(x: &SSet, n: usize, budget: &Budget) -> Result<Vec<SMap>> {
    enumerate_smaps(&sd_standard(n), x, budget)
}

/// `d_i` on `Ex(X)_n`: precomposition with `Sd(delta_i)`.
pub fn ex_face(x: &SSet, n: usize, i: usize, e: &SMap) -> SMap {
    let d = sd_of_monotone(n - 1, n, &face_map(n, i));
    e.after(&sd_standard(n), x, &d)
}

/// `s_i` on `Ex(X)_n`: precomposition with `Sd(sigma_i)`.
pub fn ex_degeneracy(x: &SSet, n: usize, i: usize, e: &SMap) -> SMap {
    let s = sd_of_monotone(n + 1, n, &degeneracy_map(n, i));
    e.after(&sd_standard(n), x, &s)
}

/// Independent count of `Ex(X)_n`: assigns the top simplices (maximal
/// chains) and checks that any two agree on their common face.
pub fn ex_count_brute(x: &SSet, n: usize, budget: &Budget) -> Result<usize> {
    let sd = sd_standard(n);
    let tops = sd.count(n);
    let pool = x.simplices(n);
    let verts: Vec<Vec<usize>> = (0..tops).map(|t| sd.vertices(&Simplex::nondegenerate(n, t))).collect();
    let mut pick = vec![0usize; tops];
    let mut count = 0;
    if pool.is_empty() {
        return Ok(0);
    }
    loop {
        budget.charge("Ex brute force", 1)?;
        let mut ok = true;
        'pairs: for a in 0..tops {
            for b in a + 1..tops {
                // Positions of the shared vertices in each chain.
                let shared: Vec<(usize, usize)> = verts[a]
                    .iter()
                    .enumerate()
                    .filter_map(|(i, v)| verts[b].iter().position(|w| w == v).map(|j| (i, j)))
                    .collect();
                let ia: Vec<usize> = shared.iter().map(|p| p.0).collect();
                let ib: Vec<usize> = shared.iter().map(|p| p.1).collect();
                if x.act(&pool[pick[a]], &ia) != x.act(&pool[pick[b]], &ib) {
                    ok = false;
                    break 'pairs;
                }
            }
        }
        count += usize::from(ok);
        let mut i = tops;
        loop {
            if i == 0 {
                return Ok(count);
            }
            i -= 1;
            pick[i] += 1;
            if pick[i] < pool.len() {
                break;
            }
            pick[i] = 0;
        }
    }
}

/// Filling status of one horn or boundary inclusion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftStatus {
    pub n: usize,
    /// Horn index; `None` for the boundary inclusion.
    pub k: Option<usize>,
    pub squares: usize,
    pub unfillable: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftReport {
    pub checks: Vec<LiftStatus>,
}

impl LiftReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.unfillable.is_none())
    }
}

impl fmt::Display for LiftReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let what = match c.k {
                Some(k) => format!("Lambda{}_{}", c.n, k),
                None => format!("dDelta{}", c.n),
            };
            match &c.unfillable {
                None => writeln!(f, "{what}: {} squares, all fill", c.squares)?,
                Some(w) => writeln!(f, "{what}: unfillable {w}")?,
            }
        }
        Ok(())
    }
}

/// Compatible families `(x_i)_{i in faces}` in `X_{n-1}`.
fn compatible_families(x: &SSet, n: usize, faces: &[usize], budget: &Budget) -> Result<Vec<Vec<Simplex>>> {
    let pool = x.simplices(n - 1);
    let mut out = Vec::new();
    let mut cur: Vec<Simplex> = Vec::new();
    fn rec(
        x: &SSet,
        n: usize,
        faces: &[usize],
        pool: &[Simplex],
        cur: &mut Vec<Simplex>,
        out: &mut Vec<Vec<Simplex>>,
        budget: &Budget,
    ) -> Result<()> {
        if cur.len() == faces.len() {
            out.push(cur.clone());
            return Ok(());
        }
        let j = faces[cur.len()];
        for cand in pool {
            budget.charge("horn enumeration", 1)?;
            // d_i x_j = d_{j-1} x_i for i < j.
            let ok =
                n < 2 || faces[..cur.len()].iter().zip(cur.iter()).all(|(&i, xi)| x.face(cand, i) == x.face(xi, j - 1));
            if ok {
                cur.push(cand.clone());
                rec(x, n, faces, pool, cur, out, budget)?;
                cur.pop();
            }
        }
        Ok(())
    }
    rec(x, n, faces, &pool, &mut cur, &mut out, budget)?;
    Ok(out)
}

fn lift_check(x: &SSet, y: &SSet, f: &SMap, n: usize, k: Option<usize>, budget: &Budget) -> Result<LiftStatus> {
    let faces: Vec<usize> = (0..=n).filter(|&i| Some(i) != k).collect();
    let fams = if n == 0 { vec![Vec::new()] } else { compatible_families(x, n, &faces, budget)? };
    let xn = x.simplices(n);
    let yn = y.simplices(n);
    let mut squares = 0;
    for fam in &fams {
        for t in &yn {
            if n > 0 && !faces.iter().zip(fam).all(|(&i, xi)| y.face(t, i) == f.apply(y, xi)) {
                continue;
            }
            squares += 1;
            let filled = xn
                .iter()
                .any(|c| f.apply(y, c) == *t && (n == 0 || faces.iter().zip(fam).all(|(&i, xi)| x.face(c, i) == *xi)));
            if !filled {
                let shown: Vec<String> = fam.iter().map(|s| x.show(s)).collect();
                return Ok(LiftStatus {
                    n,
                    k,
                    squares,
                    unfillable: Some(format!("faces [{}] over {}", shown.join(", "), y.show(t))),
                });
            }
        }
    }
    Ok(LiftStatus { n, k, squares, unfillable: None })
}

/// Right lifting against `Lambda^n_k -> Delta^n` for `1 <= n <= n_max`.
pub fn is_kan_fibration_bounded(x: &SSet, y: &SSet, f: &SMap, n_max: usize, budget: &Budget) -> Result<LiftReport> {
    let mut checks = Vec::new();
    for n in 1..=n_max {
        for k in 0..=n {
            checks.push(lift_check(x, y, f, n, Some(k), budget)?);
        }
    }
    Ok(LiftReport { checks })
}

/// Right lifting against `dDelta^n -> Delta^n` for `0 <= n <= n_max`.
pub fn is_trivial_fibration_bounded(x: &SSet, y: &SSet, f: &SMap, n_max: usize, budget: &Budget) -> Result<LiftReport> {
    let mut checks = Vec::new();
    for n in 0..=n_max {
        checks.push(lift_check(x, y, f, n, None, budget)?);
    }
    Ok(LiftReport { checks })
}

/// The unique map to `Delta^0`.
pub fn to_point(x: &SSet) -> SMap {
    SMap {
        images: x.nd.iter().enumerate().map(|(k, l)| vec![Simplex { sigma: vec![0; k + 1], nd: 0 }; l.len()]).collect(),
    }
}

/// Number of fillers of each horn `Lambda^n_k -> X`, for `n <= n_max`.
pub fn horn_filler_counts(x: &SSet, n: usize, k: usize, budget: &Budget) -> Result<Vec<usize>> {
    let faces: Vec<usize> = (0..=n).filter(|&i| i != k).collect();
    let xn = x.simplices(n);
    Ok(compatible_families(x, n, &faces, budget)?
        .iter()
        .map(|fam| xn.iter().filter(|c| faces.iter().zip(fam).all(|(&i, xi)| x.face(c, i) == *xi)).count())
        .collect())
}

/// Isomorphism of the nondegenerate structure, by backtracking degree by degree.
pub fn isomorphic(a: &SSet, b: &SSet) -> Option<SMap> {
    if a.counts() != b.counts() {
        return None;
    }
    let order: Vec<(usize, usize)> =
        a.nd.iter().enumerate().flat_map(|(k, l)| (0..l.len()).map(move |i| (k, i))).collect();
    let mut img: Vec<Vec<Option<usize>>> = a.nd.iter().map(|l| vec![None; l.len()]).collect();
    let mut used: Vec<Vec<bool>> = b.nd.iter().map(|l| vec![false; l.len()]).collect();
    fn rec(
        pos: usize,
        order: &[(usize, usize)],
        a: &SSet,
        b: &SSet,
        img: &mut Vec<Vec<Option<usize>>>,
        used: &mut Vec<Vec<bool>>,
    ) -> bool {
        if pos == order.len() {
            return true;
        }
        let (k, i) = order[pos];
        for j in 0..b.count(k) {
            if used[k][j] {
                continue;
            }
            let ok = a.nd[k][i]
                .faces
                .iter()
                .zip(&b.nd[k][j].faces)
                .all(|(fa, fb)| fa.sigma == fb.sigma && img[fa.base_dim()][fa.nd] == Some(fb.nd));
            if ok {
                img[k][i] = Some(j);
                used[k][j] = true;
                if rec(pos + 1, order, a, b, img, used) {
                    return true;
                }
                img[k][i] = None;
                used[k][j] = false;
            }
        }
        false
    }
    if !rec(0, &order, a, b, &mut img, &mut used) {
        return None;
    }
    Some(SMap {
        images: img
            .iter()
            .enumerate()
            .map(|(k, l)| l.iter().map(|j| Simplex::nondegenerate(k, j.unwrap())).collect())
            .collect(),
    })
}

/// Looks up a nondegenerate simplex by name.
pub fn simplex_by_name(x: &SSet, name: &str) -> Result<Simplex> {
    x.find_name(name).ok_or_else(|| Error::Input(format!("no simplex named {name}")))
}
