//! Torsion-bound exponents `g(i) = 1 + m(i) + v2((i-1)!)` and
//! `t(i) = 1 + sum_{j=3}^{i} g(j) + v2((i-1)!)`.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{pow2, v2_factorial};
use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Paper,
    User,
}

/// Known values of `m(i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MTable {
    entries: BTreeMap<usize, (u64, Provenance)>,
}

impl Default for MTable {
    fn default() -> Self {
        Self::published()
    }
}

impl MTable {
    /// `m(3) = 0`, `m(4) = 1`.
    pub fn published() -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(3, (0, Provenance::Paper));
        entries.insert(4, (1, Provenance::Paper));
        MTable { entries }
    }

    pub fn empty() -> Self {
        MTable { entries: BTreeMap::new() }
    }

    pub fn set(&mut self, i: usize, m: u64) {
        self.entries.insert(i, (m, Provenance::User));
    }

    pub fn with(mut self, i: usize, m: u64) -> Self {
        self.set(i, m);
        self
    }

    pub fn get(&self, i: usize) -> Option<(u64, Provenance)> {
        self.entries.get(&i).copied()
    }

    /// Parses `i=m`.
    pub fn parse_override(s: &str) -> Result<(usize, u64)> {
        let (i, m) = s.split_once('=').ok_or_else(|| Error::Parse(format!("expected i=m, got {s:?}")))?;
        let i = usize::from_str(i.trim()).map_err(|_| Error::Parse(format!("bad index in {s:?}")))?;
        let m = u64::from_str(m.trim()).map_err(|_| Error::Parse(format!("bad value in {s:?}")))?;
        if i < 3 {
            return Err(Error::Parse(format!("m(i) is indexed from 3, got {i}")));
        }
        Ok((i, m))
    }
}

fn check_index(i: usize) -> Result<()> {
    if i < 3 {
        return Err(Error::IndexOutOfRange { index: i, max: usize::MAX });
    }
    Ok(())
}

pub fn g(i: usize, table: &MTable) -> Result<u64> {
    check_index(i)?;
    let (m, _) = table.get(i).ok_or(Error::MissingM(i as u32))?;
    Ok(1 + m + v2_factorial(i - 1))
}

pub fn t(i: usize, table: &MTable) -> Result<u64> {
    check_index(i)?;
    let mut sum = 0;
    for j in 3..=i {
        sum += g(j, table)?;
    }
    Ok(1 + sum + v2_factorial(i - 1))
}

/// Constant part plus the indices whose `m` is unknown.
fn symbolic(constant: u64, missing: &[usize]) -> String {
    let mut s = constant.to_string();
    for j in missing {
        s.push_str(&format!("+m({j})"));
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub i: usize,
    pub m: Option<u64>,
    pub m_source: Option<Provenance>,
    /// Decimal value, or a formula in the unknown `m(j)`.
    pub g: String,
    pub t: String,
    pub annihilator_g: Option<String>,
    pub annihilator_t: Option<String>,
}

pub fn bounds_table(i_max: usize, table: &MTable) -> Vec<BoundsRow> {
    let mut rows = Vec::new();
    let mut t_constant = 0u64;
    let mut t_missing: Vec<usize> = Vec::new();
    for i in 3..=i_max {
        let entry = table.get(i);
        let g_constant = 1 + v2_factorial(i - 1) + entry.map_or(0, |(m, _)| m);
        t_constant += g_constant;
        if entry.is_none() {
            t_missing.push(i);
        }
        let t_value = 1 + t_constant + v2_factorial(i - 1);
        let g_missing: Vec<usize> = if entry.is_none() { vec![i] } else { Vec::new() };
        rows.push(BoundsRow {
            i,
            m: entry.map(|(m, _)| m),
            m_source: entry.map(|(_, p)| p),
            g: symbolic(g_constant, &g_missing),
            t: symbolic(t_value, &t_missing),
            annihilator_g: g_missing.is_empty().then(|| pow2(g_constant as usize).to_string()),
            annihilator_t: t_missing.is_empty().then(|| pow2(t_value as usize).to_string()),
        });
    }
    rows
}

pub fn to_csv(rows: &[BoundsRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn to_json(rows: &[BoundsRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn published_values() {
        let mt = MTable::published();
        assert_eq!(g(3, &mt).unwrap(), 2);
        assert_eq!(g(4, &mt).unwrap(), 3);
        assert_eq!(t(3, &mt).unwrap(), 4);
        assert_eq!(t(4, &mt).unwrap(), 7);
        assert_eq!(g(3, &MTable::empty().with(3, 0)).unwrap(), 2);
        assert_eq!(g(5, &mt), Err(Error::MissingM(5)));
        assert_eq!(t(5, &mt), Err(Error::MissingM(5)));
        assert!(g(2, &mt).is_err());
    }

    #[test]
    fn table_rows() {
        let rows = bounds_table(6, &MTable::published());
        assert_eq!(rows.len(), 4);
        assert_eq!((rows[0].g.as_str(), rows[0].t.as_str()), ("2", "4"));
        assert_eq!((rows[1].g.as_str(), rows[1].t.as_str()), ("3", "7"));
        assert_eq!(rows[1].annihilator_t.as_deref(), Some("128"));
        // v2(4!) = 3, so g(5) = 4 + m(5); t(5) = 1 + 2 + 3 + 4 + 3 + m(5)
        assert_eq!(rows[2].g, "4+m(5)");
        assert_eq!(rows[2].t, "13+m(5)");
        assert_eq!(rows[3].t, "17+m(5)+m(6)");
        assert!(rows[2].annihilator_g.is_none());
        let with5 = bounds_table(5, &MTable::published().with(5, 2));
        assert_eq!(with5[2].g, "6");
        assert_eq!(with5[2].m_source, Some(Provenance::User));
        assert_eq!(with5[2].t, "15");
    }

    #[test]
    fn serializations_are_stable() {
        let rows = bounds_table(5, &MTable::published());
        assert_eq!(to_csv(&rows).unwrap(), to_csv(&bounds_table(5, &MTable::published())).unwrap());
        let csv = to_csv(&rows).unwrap();
        assert!(csv.starts_with("i,m,m_source,g,t,annihilator_g,annihilator_t\n3,0,paper,2,4,4,16\n"));
        assert!(to_json(&rows).contains("\"m_source\": \"paper\""));
    }

    #[test]
    fn parse_overrides() {
        assert_eq!(MTable::parse_override("5=2").unwrap(), (5, 2));
        assert!(MTable::parse_override("5").is_err());
        assert!(MTable::parse_override("2=1").is_err());
        assert!(MTable::parse_override("x=1").is_err());
    }

    proptest! {
        #[test]
        fn t_recurrence(ms in prop::collection::vec(0u64..5, 8)) {
            let mut table = MTable::empty();
            for (k, m) in ms.iter().enumerate() {
                table.set(k + 3, *m);
            }
            for i in 4..=10 {
                let lhs = t(i, &table).unwrap() as i64 - t(i - 1, &table).unwrap() as i64;
                let rhs = g(i, &table).unwrap() as i64 + v2_factorial(i - 1) as i64 - v2_factorial(i - 2) as i64;
                prop_assert_eq!(lhs, rhs);
                prop_assert!(t(i, &table).unwrap() >= t(i - 1, &table).unwrap());
            }
        }
    }
}
