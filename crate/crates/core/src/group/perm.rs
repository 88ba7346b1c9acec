//! Finite permutation groups, enumerated in full.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// A permutation of `0..degree`, stored as its image list.
pub type Perm = Vec<u32>;

/// Default bound on the order of an enumerated group.
pub const DEFAULT_ORDER_BOUND: usize = 20_000;

/// Largest order for which a full multiplication table is cached.
const TABLE_LIMIT: usize = 1024;

pub fn identity_perm(degree: usize) -> Perm {
    (0..degree as u32).collect()
}

/// `(a * b)(x) = a(b(x))`: the right factor acts first.
pub fn compose(a: &[u32], b: &[u32]) -> Perm {
    b.iter().map(|&x| a[x as usize]).collect()
}

pub fn inverse_perm(a: &[u32]) -> Perm {
    let mut out = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        out[x as usize] = i as u32;
    }
    out
}

/// Parses cycle notation with 1-based points, e.g. `(1 2)(3 4)`, `(1,2,3)` or `()`.
///
/// Cycles are composed right to left, consistent with [`compose`].
pub fn parse_cycles(text: &str, degree: usize) -> Result<Perm> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Parse("empty permutation".into()));
    }
    let mut cycles: Vec<Vec<u32>> = Vec::new();
    let mut rest = text;
    while !rest.is_empty() {
        let open = rest
            .strip_prefix('(')
            .ok_or_else(|| Error::Parse(format!("expected '(' in {text:?}")))?;
        let close = open
            .find(')')
            .ok_or_else(|| Error::Parse(format!("unbalanced parentheses in {text:?}")))?;
        let body = &open[..close];
        let mut cycle = Vec::new();
        for tok in body.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let point: usize = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad point {tok:?} in {text:?}")))?;
            if point == 0 || point > degree {
                return Err(Error::Parse(format!("point {point} outside 1..={degree}")));
            }
            let p = (point - 1) as u32;
            if cycle.contains(&p) {
                return Err(Error::Parse(format!("repeated point {point} in {text:?}")));
            }
            cycle.push(p);
        }
        cycles.push(cycle);
        rest = open[close + 1..].trim_start();
    }
    let mut perm = identity_perm(degree);
    for cycle in &cycles {
        let mut c = identity_perm(degree);
        for (i, &x) in cycle.iter().enumerate() {
            c[x as usize] = cycle[(i + 1) % cycle.len()];
        }
        perm = compose(&perm, &c);
    }
    Ok(perm)
}

/// Canonical cycle notation: cycles start at their smallest point and are
/// ordered by it; fixed points are omitted; the identity prints as `()`.
pub fn format_cycles(perm: &[u32]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for start in 0..perm.len() {
        if seen[start] || perm[start] as usize == start {
            continue;
        }
        out.push('(');
        let mut x = start;
        let mut first = true;
        while !seen[x] {
            seen[x] = true;
            if !first {
                out.push(' ');
            }
            first = false;
            out.push_str(&(x + 1).to_string());
            x = perm[x] as usize;
        }
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

/// A finite permutation group with every element enumerated.
///
/// Elements are numbered in breadth-first order from the identity (index 0)
/// under right multiplication by the generators.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    degree: usize,
    elements: Vec<Perm>,
    lookup: HashMap<Perm, u32>,
    inverses: Vec<u32>,
    generators: Vec<u32>,
    table: Option<Vec<u32>>,
}

impl FiniteGroup {
    pub fn generate(degree: usize, generators: &[Perm], bound: usize) -> Result<Self> {
        for g in generators {
            if g.len() != degree {
                return Err(Error::InvalidElement(format!(
                    "generator of degree {} in a group of degree {degree}",
                    g.len()
                )));
            }
        }
        let id = identity_perm(degree);
        let mut elements = vec![id.clone()];
        let mut lookup = HashMap::from([(id, 0u32)]);
        let mut i = 0;
        while i < elements.len() {
            for g in generators {
                let x = compose(&elements[i], g);
                if !lookup.contains_key(&x) {
                    if elements.len() >= bound {
                        return Err(Error::OrderBoundExceeded { bound });
                    }
                    lookup.insert(x.clone(), elements.len() as u32);
                    elements.push(x);
                }
            }
            i += 1;
        }
        let inverses = elements.iter().map(|e| lookup[&inverse_perm(e)]).collect();
        let gen_idx = generators.iter().map(|g| lookup[g]).collect();
        let mut group = FiniteGroup {
            degree,
            elements,
            lookup,
            inverses,
            generators: gen_idx,
            table: None,
        };
        let n = group.order();
        if n <= TABLE_LIMIT {
            let mut table = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    table.push(group.lookup[&compose(&group.elements[a], &group.elements[b])]);
                }
            }
            group.table = Some(table);
        }
        Ok(group)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    pub fn perm(&self, idx: u32) -> &[u32] {
        &self.elements[idx as usize]
    }

    pub fn index_of(&self, perm: &[u32]) -> Option<u32> {
        self.lookup.get(perm).copied()
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.table {
            Some(t) => t[a as usize * self.order() + b as usize],
            None => self.lookup[&compose(&self.elements[a as usize], &self.elements[b as usize])],
        }
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inverses[a as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_round_trip() {
        let p = parse_cycles("(1 3)(2 4 5)", 5).unwrap();
        assert_eq!(format_cycles(&p), "(1 3)(2 4 5)");
        assert_eq!(format_cycles(&parse_cycles("()", 3).unwrap()), "()");
        assert_eq!(format_cycles(&parse_cycles("(3,1,2)", 3).unwrap()), "(1 2 3)");
    }

    #[test]
    fn composition_applies_right_factor_first() {
        let s = parse_cycles("(1 2)", 3).unwrap();
        let r = parse_cycles("(1 2 3)", 3).unwrap();
        assert_eq!(format_cycles(&compose(&s, &r)), "(2 3)");
        assert_eq!(format_cycles(&compose(&r, &s)), "(1 3)");
        // non-disjoint cycles in one word compose the same way
        assert_eq!(parse_cycles("(1 2)(1 2 3)", 3).unwrap(), compose(&s, &r));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_cycles("(1 5)", 4).is_err());
        assert!(parse_cycles("(1 1)", 4).is_err());
        assert!(parse_cycles("1 2", 4).is_err());
        assert!(parse_cycles("(1 2", 4).is_err());
    }

    #[test]
    fn enumerates_symmetric_groups() {
        let s3 = FiniteGroup::generate(
            3,
            &[parse_cycles("(1 2)", 3).unwrap(), parse_cycles("(1 2 3)", 3).unwrap()],
            DEFAULT_ORDER_BOUND,
        )
        .unwrap();
        assert_eq!(s3.order(), 6);
        let s4 = FiniteGroup::generate(
            4,
            &[parse_cycles("(1 2)", 4).unwrap(), parse_cycles("(1 2 3 4)", 4).unwrap()],
            DEFAULT_ORDER_BOUND,
        )
        .unwrap();
        assert_eq!(s4.order(), 24);
        let trivial = FiniteGroup::generate(2, &[], DEFAULT_ORDER_BOUND).unwrap();
        assert_eq!(trivial.order(), 1);
    }

    #[test]
    fn order_bound_is_enforced() {
        let gens = [parse_cycles("(1 2)", 5).unwrap(), parse_cycles("(1 2 3 4 5)", 5).unwrap()];
        assert!(matches!(
            FiniteGroup::generate(5, &gens, 100),
            Err(Error::OrderBoundExceeded { bound: 100 })
        ));
    }
}
