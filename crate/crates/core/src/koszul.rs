//! Koszul cochains `K^p = (Gamma F)^{binom(d, p)}` and the differential
//! `(d w)_T = sum_k (-1)^k (sigma_{t_k} - 1) w_{T - t_k}` for `T = {t_0 < ... < t_p}`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::Scalar;
use crate::sections::{Section, Sheaf};
use crate::supports::SupportFamily;

/// Strictly increasing 0-based generator indices.
pub type Subset = Vec<usize>;

/// All `p`-element subsets of `{0, .., d-1}` in lexicographic order.
pub fn subsets(d: usize, p: usize) -> Vec<Subset> {
    fn go(start: usize, d: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Subset>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            go(i + 1, d, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p <= d {
        go(0, d, p, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Clone, PartialEq, Eq)]
pub struct Cochain {
    sheaf: Arc<Sheaf>,
    degree: usize,
    components: BTreeMap<Subset, Section>,
}

impl fmt::Debug for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K^{}", self.degree)?;
        f.debug_map().entries(self.components.iter()).finish()
    }
}

impl Cochain {
    pub fn zero(sheaf: &Arc<Sheaf>, degree: usize) -> Result<Self> {
        let d = sheaf.acting_rank();
        if degree > d {
            return Err(Error::DegreeOutOfRange { degree, rank: d });
        }
        Ok(Cochain {
            sheaf: Arc::clone(sheaf),
            degree,
            components: BTreeMap::new(),
        })
    }

    pub fn from_components<I>(sheaf: &Arc<Sheaf>, degree: usize, components: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Subset, Section)>,
    {
        let mut c = Cochain::zero(sheaf, degree)?;
        for (t, s) in components {
            c.set(t, s)?;
        }
        Ok(c)
    }

    /// A 0-cochain is just a section.
    pub fn from_section(s: Section) -> Self {
        let sheaf = Arc::clone(s.sheaf());
        let mut components = BTreeMap::new();
        if !s.is_zero() {
            components.insert(Vec::new(), s);
        }
        Cochain {
            sheaf,
            degree: 0,
            components,
        }
    }

    pub fn sheaf(&self) -> &Arc<Sheaf> {
        &self.sheaf
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn acting_rank(&self) -> usize {
        self.sheaf.acting_rank()
    }

    fn check_subset(&self, t: &[usize]) -> Result<()> {
        let d = self.acting_rank();
        if t.len() != self.degree {
            return Err(Error::MalformedDescriptor(format!(
                "component {t:?} in a degree {} cochain",
                self.degree
            )));
        }
        if !t.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::MalformedDescriptor(format!("component {t:?} is not increasing")));
        }
        if let Some(&i) = t.iter().find(|&&i| i >= d) {
            return Err(Error::GeneratorOutOfRange { index: i, rank: d });
        }
        Ok(())
    }

    pub fn set(&mut self, t: Subset, s: Section) -> Result<()> {
        self.check_subset(&t)?;
        if s.sheaf() != &self.sheaf {
            return Err(Error::SpaceMismatch);
        }
        if s.is_zero() {
            self.components.remove(&t);
        } else {
            self.components.insert(t, s);
        }
        Ok(())
    }

    pub fn component(&self, t: &[usize]) -> Section {
        self.components
            .get(t)
            .cloned()
            .unwrap_or_else(|| Section::zero(&self.sheaf))
    }

    /// Nonzero components in lexicographic order of their index sets.
    pub fn components(&self) -> impl Iterator<Item = (&Subset, &Section)> {
        self.components.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn checked_add(&self, other: &Cochain) -> Result<Cochain> {
        self.combine(other, false)
    }

    pub fn checked_sub(&self, other: &Cochain) -> Result<Cochain> {
        self.combine(other, true)
    }

    fn combine(&self, other: &Cochain, subtract: bool) -> Result<Cochain> {
        if self.degree != other.degree {
            return Err(Error::DegreeOutOfRange {
                degree: other.degree,
                rank: self.acting_rank(),
            });
        }
        let mut out = self.clone();
        for (t, s) in &other.components {
            let cur = out.component(t);
            let next = if subtract {
                cur.checked_sub(s)?
            } else {
                cur.checked_add(s)?
            };
            out.set(t.clone(), next)?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Cochain {
        let mut out = Cochain {
            sheaf: Arc::clone(&self.sheaf),
            degree: self.degree,
            components: BTreeMap::new(),
        };
        for (t, s) in &self.components {
            let s = s.scale(c);
            if !s.is_zero() {
                out.components.insert(t.clone(), s);
            }
        }
        out
    }

    pub fn differential(&self) -> Result<Cochain> {
        let d = self.acting_rank();
        let degree = self.degree + 1;
        if degree > d {
            return Err(Error::DegreeOutOfRange { degree, rank: d });
        }
        let mut acc: BTreeMap<Subset, Section> = BTreeMap::new();
        for (t, s) in &self.components {
            for i in (0..d).filter(|i| !t.contains(i)) {
                let pos = t.iter().filter(|&&j| j < i).count();
                let mut term = s.sigma_minus_one(i)?;
                if pos % 2 == 1 {
                    term = -&term;
                }
                let mut target = t.clone();
                target.insert(pos, i);
                let entry = acc.entry(target).or_insert_with(|| Section::zero(&self.sheaf));
                *entry = entry.checked_add(&term)?;
            }
        }
        acc.retain(|_, s| !s.is_zero());
        Ok(Cochain {
            sheaf: Arc::clone(&self.sheaf),
            degree,
            components: acc,
        })
    }

    /// Top-degree cochains are cocycles trivially.
    pub fn is_cocycle(&self) -> Result<bool> {
        if self.degree == self.acting_rank() {
            return Ok(true);
        }
        Ok(self.differential()?.is_zero())
    }

    pub fn in_family(&self, family: &SupportFamily) -> bool {
        self.components.values().all(|s| s.in_family(family))
    }

    pub fn is_finitely_supported(&self) -> bool {
        self.components.values().all(Section::is_finitely_supported)
    }
}
