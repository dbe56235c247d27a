//! Constraint search over tuples of bijections.
//!
//! Variables are bijections on `{0, .., n-1}`; constraints are relators,
//! words in the variables (each letter possibly inverted) whose composite,
//! applying letters left to right, must be the identity. A relator with a
//! single unassigned variable occurring once determines that variable.

use std::ops::ControlFlow;

use crate::perm::Bij;

#[derive(Debug, Clone, Default)]
pub struct BijCsp {
    sizes: Vec<usize>,
    relators: Vec<Vec<(usize, bool)>>,
    watch: Vec<Vec<usize>>,
}

impl BijCsp {
    pub fn new(sizes: Vec<usize>) -> Self {
        let watch = vec![Vec::new(); sizes.len()];
        BijCsp { sizes, relators: Vec::new(), watch }
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    /// Adds a relator; letters `(var, inverted)` are applied left to right.
    ///
    /// # Panics
    /// If the letters act on carriers of different sizes.
    pub fn add_relator(&mut self, word: Vec<(usize, bool)>) {
        if word.is_empty() {
            return;
        }
        let n = self.sizes[word[0].0];
        assert!(word.iter().all(|&(v, _)| self.sizes[v] == n), "relator mixes carrier sizes");
        let k = self.relators.len();
        let mut vars: Vec<usize> = word.iter().map(|&(v, _)| v).collect();
        vars.sort_unstable();
        vars.dedup();
        for v in vars {
            self.watch[v].push(k);
        }
        self.relators.push(word);
    }

    pub fn add_identity(&mut self, v: usize) {
        self.add_relator(vec![(v, false)]);
    }

    pub fn add_equal(&mut self, a: usize, b: usize) {
        if a != b {
            self.add_relator(vec![(a, false), (b, true)]);
        }
    }

    /// Visits every solution in lexicographic order of the free choices.
    pub fn solve(&self, mut visit: impl FnMut(&[Bij]) -> ControlFlow<()>) -> ControlFlow<()> {
        let mut assign: Vec<Option<Bij>> = vec![None; self.sizes.len()];
        let perms: Vec<Vec<Bij>> = {
            let max = self.sizes.iter().copied().max().unwrap_or(0);
            (0..=max).map(Bij::all).collect()
        };
        self.branch(0, &mut assign, &perms, &mut visit)
    }

    pub fn count(&self) -> usize {
        let mut n = 0;
        let _ = self.solve(|_| {
            n += 1;
            ControlFlow::Continue(())
        });
        n
    }

    pub fn first(&self) -> Option<Vec<Bij>> {
        let mut out = None;
        let _ = self.solve(|s| {
            out = Some(s.to_vec());
            ControlFlow::Break(())
        });
        out
    }

    pub fn all(&self) -> Vec<Vec<Bij>> {
        let mut out = Vec::new();
        let _ = self.solve(|s| {
            out.push(s.to_vec());
            ControlFlow::Continue(())
        });
        out
    }

    fn branch(
        &self,
        from: usize,
        assign: &mut Vec<Option<Bij>>,
        perms: &[Vec<Bij>],
        visit: &mut dyn FnMut(&[Bij]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let Some(v) = (from..assign.len()).find(|&v| assign[v].is_none()) else {
            let sol: Vec<Bij> = assign.iter().map(|b| b.clone().expect("all assigned")).collect();
            return visit(&sol);
        };
        for b in &perms[self.sizes[v]] {
            let mut trail = Vec::new();
            if self.assign_and_propagate(v, b.clone(), assign, &mut trail) {
                self.branch(v + 1, assign, perms, visit)?;
            }
            for u in trail {
                assign[u] = None;
            }
        }
        ControlFlow::Continue(())
    }

    fn assign_and_propagate(&self, v: usize, b: Bij, assign: &mut [Option<Bij>], trail: &mut Vec<usize>) -> bool {
        let mut queue = vec![(v, b)];
        while let Some((v, b)) = queue.pop() {
            match &assign[v] {
                Some(existing) if *existing == b => continue,
                Some(_) => return false,
                None => {
                    assign[v] = Some(b);
                    trail.push(v);
                }
            }
            for &k in &self.watch[v] {
                match self.examine(k, assign) {
                    Examined::Violated => return false,
                    Examined::Forced(u, bij) => queue.push((u, bij)),
                    Examined::Open => {}
                }
            }
        }
        true
    }

    fn examine(&self, k: usize, assign: &[Option<Bij>]) -> Examined {
        let word = &self.relators[k];
        let mut hole: Option<usize> = None;
        for (pos, &(v, _)) in word.iter().enumerate() {
            if assign[v].is_none() {
                if hole.is_some() || word.iter().filter(|&&(u, _)| u == v).count() > 1 {
                    return Examined::Open;
                }
                hole = Some(pos);
            }
        }
        let n = self.sizes[word[0].0];
        let letter = |pos: usize| {
            let (v, inv) = word[pos];
            let b = assign[v].as_ref().expect("assigned");
            if inv {
                b.inverse()
            } else {
                b.clone()
            }
        };
        match hole {
            None => {
                let total = (0..word.len()).fold(Bij::identity(n), |acc, pos| acc.then(&letter(pos)));
                if total.is_identity() {
                    Examined::Open
                } else {
                    Examined::Violated
                }
            }
            Some(h) => {
                // prefix . x . suffix = id, so x = prefix^-1 . suffix^-1.
                let prefix = (0..h).fold(Bij::identity(n), |acc, pos| acc.then(&letter(pos)));
                let suffix = (h + 1..word.len()).fold(Bij::identity(n), |acc, pos| acc.then(&letter(pos)));
                let x = prefix.inverse().then(&suffix.inverse());
                let (v, inv) = word[h];
                Examined::Forced(v, if inv { x.inverse() } else { x })
            }
        }
    }
}

enum Examined {
    Open,
    Violated,
    Forced(usize, Bij),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_variables() {
        assert_eq!(BijCsp::new(vec![2, 3]).count(), 12);
        assert_eq!(BijCsp::new(vec![]).count(), 1);
        assert_eq!(BijCsp::new(vec![0]).count(), 1);
    }

    #[test]
    fn involutions() {
        let mut c = BijCsp::new(vec![3]);
        c.add_relator(vec![(0, false), (0, false)]);
        assert_eq!(c.count(), 4);
    }

    #[test]
    fn propagation_through_equalities() {
        let mut c = BijCsp::new(vec![2, 2, 2]);
        c.add_equal(0, 1);
        c.add_relator(vec![(1, false), (2, false)]);
        let all = c.all();
        assert_eq!(all.len(), 2);
        for s in all {
            assert_eq!(s[0], s[1]);
            assert_eq!(s[2], s[1].inverse());
        }
    }

    #[test]
    fn contradiction() {
        let mut c = BijCsp::new(vec![2, 2]);
        c.add_identity(0);
        c.add_equal(0, 1);
        c.add_relator(vec![(1, false)]);
        assert_eq!(c.count(), 1);
        let mut d = BijCsp::new(vec![2]);
        d.add_identity(0);
        // x^3 = id and x = id: consistent; x x = swap-like impossible to force here.
        d.add_relator(vec![(0, false), (0, false), (0, false)]);
        assert_eq!(d.count(), 1);
    }
}
