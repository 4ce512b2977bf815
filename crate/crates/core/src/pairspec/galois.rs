use super::PairError;
use std::collections::{BTreeSet, HashMap};
use std::hash::Hash;

/// A permutation group on {0..n}, stored by its generators and full element list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisData {
    pub n: usize,
    pub generators: Vec<Vec<usize>>,
    pub elements: Vec<Vec<usize>>,
}

fn is_perm(p: &[usize], n: usize) -> bool {
    p.len() == n && p.iter().collect::<BTreeSet<_>>().len() == n && p.iter().all(|&x| x < n)
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    // (a . b)(i) = a(b(i))
    b.iter().map(|&i| a[i]).collect()
}

impl GaloisData {
    pub fn trivial(n: usize) -> Self {
        GaloisData {
            n,
            generators: vec![],
            elements: vec![(0..n).collect()],
        }
    }

    pub fn from_generators(n: usize, generators: Vec<Vec<usize>>) -> Result<Self, PairError> {
        for g in &generators {
            if !is_perm(g, n) {
                return Err(PairError::Galois(format!(
                    "{g:?} is not a permutation of {n} letters"
                )));
            }
        }
        let id: Vec<usize> = (0..n).collect();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::from([id.clone()]);
        let mut queue = vec![id];
        while let Some(x) = queue.pop() {
            for g in &generators {
                let y = compose(g, &x);
                if seen.insert(y.clone()) {
                    queue.push(y);
                }
            }
        }
        Ok(GaloisData {
            n,
            generators,
            elements: seen.into_iter().collect(),
        })
    }

    pub fn cyclic(n: usize) -> Self {
        let g: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        Self::from_generators(n, if n > 1 { vec![g] } else { vec![] })
            .expect("cycle is a permutation")
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_transitive(&self) -> bool {
        self.point_orbits().len() <= 1
    }

    pub fn point_orbits(&self) -> Vec<Vec<usize>> {
        let items: Vec<usize> = (0..self.n).collect();
        self.orbits(&items, |p, &i| p[i])
            .expect("points are closed under the group")
            .1
    }

    /// Orbits of `items` under the group acting through `act`; returns the Burnside count
    /// and the explicit orbit partition (as index lists, each sorted).
    pub fn orbits<T, F>(&self, items: &[T], act: F) -> Result<(usize, Vec<Vec<usize>>), PairError>
    where
        T: Eq + Hash + Clone + std::fmt::Debug,
        F: Fn(&[usize], &T) -> T,
    {
        let index: HashMap<&T, usize> = items.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut image = Vec::with_capacity(self.elements.len());
        for p in &self.elements {
            let mut row = Vec::with_capacity(items.len());
            for t in items {
                let u = act(p, t);
                match index.get(&u) {
                    Some(&j) => row.push(j),
                    None => {
                        return Err(PairError::Galois(format!(
                            "action sends {t:?} outside the set"
                        )))
                    }
                }
            }
            image.push(row);
        }
        let fixed: usize = image
            .iter()
            .map(|row| row.iter().enumerate().filter(|(i, &j)| *i == j).count())
            .sum();
        let burnside = if self.elements.is_empty() {
            0
        } else {
            fixed / self.elements.len()
        };
        let mut orbit_of = vec![usize::MAX; items.len()];
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        for i in 0..items.len() {
            if orbit_of[i] != usize::MAX {
                continue;
            }
            let o: BTreeSet<usize> = image.iter().map(|row| row[i]).collect();
            for &j in &o {
                orbit_of[j] = orbits.len();
            }
            orbits.push(o.into_iter().collect());
        }
        if burnside != orbits.len() {
            return Err(PairError::Galois(
                "Burnside count disagrees with orbit partition".into(),
            ));
        }
        Ok((burnside, orbits))
    }
}

/// Apply a component permutation to a vector indexed by components.
pub fn permute_vector<T: Clone>(p: &[usize], w: &[T]) -> Vec<T> {
    let mut out = w.to_vec();
    for (i, x) in w.iter().enumerate() {
        out[p[i]] = x.clone();
    }
    out
}
