use std::collections::HashMap;

use crate::error::{Error, Result};

/// A finite partial order, the base category of the presheaf topos.
///
/// Points carry labels; `leq` is stored as a reflexive-transitive matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinPoset {
    labels: Vec<String>,
    leq: Vec<Vec<bool>>,
    top_down: Vec<usize>,
}

impl FinPoset {
    /// Builds the poset generated by `pairs` (each `(p, q)` meaning `p <= q`),
    /// closing reflexively and transitively and rejecting cycles.
    pub fn new<S: AsRef<str>>(labels: &[S], pairs: &[(S, S)]) -> Result<Self> {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        let mut idx = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if idx.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLabel { label: l.clone(), context: "poset points".into() });
            }
        }
        let n = labels.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (p, q) in pairs {
            let look = |s: &str| {
                idx.get(s).copied().ok_or_else(|| Error::UnknownLabel {
                    label: s.to_string(),
                    context: "poset order".into(),
                })
            };
            let (p, q) = (look(p.as_ref())?, look(q.as_ref())?);
            leq[p][q] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i][j] && leq[j][i] {
                    return Err(Error::NotAntisymmetric(labels[i].clone(), labels[j].clone()));
                }
            }
        }
        Ok(Self::from_matrix(labels, leq))
    }

    fn from_matrix(labels: Vec<String>, leq: Vec<Vec<bool>>) -> Self {
        let n = labels.len();
        // q before p whenever p < q: down-set sizes strictly increase along <.
        let mut top_down: Vec<usize> = (0..n).collect();
        let down: Vec<usize> = (0..n).map(|q| (0..n).filter(|&p| leq[p][q]).count()).collect();
        top_down.sort_by(|&a, &b| down[b].cmp(&down[a]).then(a.cmp(&b)));
        FinPoset { labels, leq, top_down }
    }

    /// The one-point poset; presheaves on it are finite sets.
    pub fn one_point() -> Self {
        Self::from_matrix(vec!["*".to_string()], vec![vec![true]])
    }

    pub fn discrete<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        Self::new::<S>(labels, &[])
    }

    /// A chain `labels[0] < labels[1] < ...`.
    pub fn chain<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let pairs: Vec<(&str, &str)> =
            labels.windows(2).map(|w| (w[0].as_ref(), w[1].as_ref())).collect();
        let labels: Vec<&str> = labels.iter().map(|s| s.as_ref()).collect();
        Self::new(&labels, &pairs)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, p: usize) -> &str {
        &self.labels[p]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn leq(&self, p: usize, q: usize) -> bool {
        self.leq[p][q]
    }

    pub fn lt(&self, p: usize, q: usize) -> bool {
        p != q && self.leq[p][q]
    }

    /// Points ordered so that larger points come first.
    pub fn top_down(&self) -> &[usize] {
        &self.top_down
    }

    /// Pairs `(p, q)` with `p < q` strictly.
    pub fn strict_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |p| (0..n).filter(move |&q| self.lt(p, q)).map(move |q| (p, q)))
    }

    /// Generating pairs of the order (the covering relation).
    pub fn covering_pairs(&self) -> Vec<(usize, usize)> {
        self.strict_pairs()
            .filter(|&(p, q)| !(0..self.len()).any(|m| self.lt(p, m) && self.lt(m, q)))
            .collect()
    }
}
