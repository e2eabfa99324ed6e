//! Game samples, Horn samples and the translation between them.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::game::Vertex;

/// Data points and vertices are the same objects.
pub type DataPoint = Vertex;

/// `lhs -> (rhs_1 op ... op rhs_n)` with `rhs` sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Implication {
    pub lhs: DataPoint,
    pub rhs: Vec<DataPoint>,
}

impl Implication {
    pub fn new(lhs: DataPoint, rhs: impl IntoIterator<Item = DataPoint>) -> Self {
        let rhs: BTreeSet<_> = rhs.into_iter().collect();
        Implication {
            lhs,
            rhs: rhs.into_iter().collect(),
        }
    }
}

/// Accumulated teacher feedback `(Pos, Neg, Ex, Un)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GameSample {
    pub pos: BTreeSet<DataPoint>,
    pub neg: BTreeSet<DataPoint>,
    pub ex: BTreeSet<Implication>,
    pub un: BTreeSet<Implication>,
}

impl GameSample {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty() && self.neg.is_empty() && self.ex.is_empty() && self.un.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pos.len() + self.neg.len() + self.ex.len() + self.un.len()
    }

    /// Every point mentioned anywhere in the sample, including right-hand sides.
    pub fn points(&self) -> BTreeSet<DataPoint> {
        let mut out: BTreeSet<DataPoint> = self.pos.iter().chain(&self.neg).cloned().collect();
        for imp in self.ex.iter().chain(&self.un) {
            out.insert(imp.lhs.clone());
            out.extend(imp.rhs.iter().cloned());
        }
        out
    }

    /// Consistency of the set `{d | member(d)}` with this sample.
    pub fn is_consistent(&self, mut member: impl FnMut(&DataPoint) -> bool) -> bool {
        self.pos.iter().all(&mut member)
            && self.neg.iter().all(|d| !member(d))
            && self
                .ex
                .iter()
                .all(|i| !member(&i.lhs) || i.rhs.iter().any(&mut member))
            && self
                .un
                .iter()
                .all(|i| !member(&i.lhs) || i.rhs.iter().all(&mut member))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Consequent {
    Point(DataPoint),
    False,
}

/// `(d_1 and ... and d_n) -> d` or `(d_1 and ... and d_n) -> false`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HornConstraint {
    pub antecedents: Vec<DataPoint>,
    pub consequent: Consequent,
}

impl HornConstraint {
    pub fn fact(d: DataPoint) -> Self {
        HornConstraint {
            antecedents: Vec::new(),
            consequent: Consequent::Point(d),
        }
    }

    pub fn goal(d: DataPoint) -> Self {
        HornConstraint {
            antecedents: alloc::vec![d],
            consequent: Consequent::False,
        }
    }

    pub fn rule(antecedents: Vec<DataPoint>, d: DataPoint) -> Self {
        HornConstraint {
            antecedents,
            consequent: Consequent::Point(d),
        }
    }

    pub fn is_satisfied_by(&self, mut member: impl FnMut(&DataPoint) -> bool) -> bool {
        if !self.antecedents.iter().all(&mut member) {
            return true;
        }
        match &self.consequent {
            Consequent::Point(d) => member(d),
            Consequent::False => false,
        }
    }
}

impl fmt::Display for HornConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, d) in self.antecedents.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str(") -> ")?;
        match &self.consequent {
            Consequent::Point(d) => write!(f, "{d}"),
            Consequent::False => f.write_str("false"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HornSample {
    pub constraints: Vec<HornConstraint>,
}

impl HornSample {
    pub fn new(constraints: Vec<HornConstraint>) -> Self {
        HornSample { constraints }
    }

    pub fn points(&self) -> BTreeSet<DataPoint> {
        let mut out = BTreeSet::new();
        for c in &self.constraints {
            out.extend(c.antecedents.iter().cloned());
            if let Consequent::Point(d) = &c.consequent {
                out.insert(d.clone());
            }
        }
        out
    }

    pub fn is_satisfied_by(&self, mut member: impl FnMut(&DataPoint) -> bool) -> bool {
        self.constraints.iter().all(|c| c.is_satisfied_by(&mut member))
    }
}

/// Horn constraints for a positive example `d`.
pub fn horn_of_positive(d: &DataPoint) -> Vec<HornConstraint> {
    alloc::vec![HornConstraint::goal(d.clone())]
}

pub fn horn_of_negative(d: &DataPoint) -> Vec<HornConstraint> {
    alloc::vec![HornConstraint::fact(d.clone())]
}

pub fn horn_of_existential(i: &Implication) -> Vec<HornConstraint> {
    alloc::vec![HornConstraint::rule(i.rhs.clone(), i.lhs.clone())]
}

pub fn horn_of_universal(i: &Implication) -> Vec<HornConstraint> {
    i.rhs
        .iter()
        .map(|d| HornConstraint::rule(alloc::vec![d.clone()], i.lhs.clone()))
        .collect()
}

/// Translates a game sample into a Horn sample over the complement: a set is
/// consistent with the result iff its complement is consistent with `sg`.
pub fn game_to_horn(sg: &GameSample) -> HornSample {
    let mut constraints = Vec::new();
    for d in &sg.pos {
        constraints.extend(horn_of_positive(d));
    }
    for d in &sg.neg {
        constraints.extend(horn_of_negative(d));
    }
    for i in &sg.ex {
        constraints.extend(horn_of_existential(i));
    }
    for i in &sg.un {
        constraints.extend(horn_of_universal(i));
    }
    HornSample { constraints }
}
