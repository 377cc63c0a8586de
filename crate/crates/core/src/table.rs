//! Knot tables: CSV ingestion, batch computation and the separation statistic.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{parse_dt, parse_pd, pd_to_upright, DtError, JsonError, PdError, UprightDiagram, UprightError};
use crate::exec::Exec;
use crate::invariant::{invariant_pair_with, InvariantError, InvariantPair};

#[derive(Debug, Error)]
pub enum ComputeError {
    #[error("DT: {0}")]
    Dt(#[from] DtError),
    #[error("PD: {0}")]
    Pd(#[from] PdError),
    #[error("JSON: {0}")]
    Json(#[from] JsonError),
    #[error("conversion: {0}")]
    Upright(#[from] UprightError),
    #[error("invariant: {0}")]
    Invariant(#[from] InvariantError),
}

pub fn diagram_from_dt(dt: &str) -> Result<UprightDiagram, ComputeError> {
    Ok(pd_to_upright(&parse_dt(dt)?)?)
}

pub fn diagram_from_pd(pd: &str) -> Result<UprightDiagram, ComputeError> {
    Ok(pd_to_upright(&parse_pd(pd)?)?)
}

pub fn compute_dt(dt: &str, exec: Exec) -> Result<InvariantPair, ComputeError> {
    Ok(invariant_pair_with(&diagram_from_dt(dt)?, exec)?)
}

pub fn compute_pd(pd: &str, exec: Exec) -> Result<InvariantPair, ComputeError> {
    Ok(invariant_pair_with(&diagram_from_pd(pd)?, exec)?)
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("cannot read table: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("expected header `name,dt`, found {0:?}")]
    Header(Vec<String>),
    #[error("duplicate knot name {0:?}")]
    DuplicateName(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Row {
    name: String,
    dt: String,
}

/// One input row and, after computation, its result.
#[derive(Clone, Debug, Serialize)]
pub struct KnotRecord {
    pub name: String,
    pub dt: String,
    pub computed: Option<InvariantPair>,
    pub error: Option<String>,
    pub wall_time: f64,
}

pub fn read_table(path: impl AsRef<Path>) -> Result<Vec<KnotRecord>, TableError> {
    read_table_from(std::fs::File::open(path)?)
}

/// Reads `name,dt` rows; blank input gives an empty table.
pub fn read_table_from(r: impl Read) -> Result<Vec<KnotRecord>, TableError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Ok(Vec::new());
    }
    if headers != ["name", "dt"] {
        return Err(TableError::Header(headers));
    }
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for row in rdr.deserialize::<Row>() {
        let row = row?;
        if !seen.insert(row.name.clone()) {
            return Err(TableError::DuplicateName(row.name));
        }
        out.push(KnotRecord {
            name: row.name,
            dt: row.dt,
            computed: None,
            error: None,
            wall_time: 0.0,
        });
    }
    Ok(out)
}

/// Computes every record. Parallelism is across knots; the output order is the input order.
pub fn compute_table(records: &[KnotRecord], exec: Exec) -> Vec<KnotRecord> {
    exec.map(records, |r| {
        let start = Instant::now();
        let res = compute_dt(&r.dt, Exec::Sequential);
        let wall_time = start.elapsed().as_secs_f64();
        let (computed, error) = match res {
            Ok(p) => (Some(p), None),
            Err(e) => (None, Some(e.to_string())),
        };
        KnotRecord {
            name: r.name.clone(),
            dt: r.dt.clone(),
            computed,
            error,
            wall_time,
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparationReport {
    pub total_knots: usize,
    pub distinct_values: usize,
    pub deficit: usize,
    /// Groups of knot names sharing one value, each sorted by input order; groups ordered by
    /// their first member.
    pub collision_classes: Vec<Vec<String>>,
}

/// Counts distinct `(Delta, rho_1)` values among computed records. With `unoriented`, a value and
/// its mirror image count as one.
pub fn separation(records: &[KnotRecord], unoriented: bool) -> SeparationReport {
    let mut classes: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut total = 0;
    for (k, r) in records.iter().enumerate() {
        let Some(p) = &r.computed else { continue };
        total += 1;
        let mut key = p.key();
        if unoriented {
            key = key.min(p.mirrored().key());
        }
        classes.entry(key).or_default().push(k);
    }
    let distinct = classes.len();
    let mut collision_classes: Vec<Vec<usize>> = classes.into_values().filter(|v| v.len() > 1).collect();
    collision_classes.sort();
    SeparationReport {
        total_knots: total,
        distinct_values: distinct,
        deficit: total - distinct,
        collision_classes: collision_classes
            .into_iter()
            .map(|v| v.into_iter().map(|k| records[k].name.clone()).collect())
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::LaurentPoly;

    const SMALL: &str = "name,dt\n3_1,4 6 2\n4_1,4 6 8 2\n5_1,6 8 10 2 4\n";

    #[test]
    fn reads_and_computes() {
        let recs = read_table_from(SMALL.as_bytes()).unwrap();
        assert_eq!(recs.len(), 3);
        let out = compute_table(&recs, Exec::Sequential);
        assert!(out.iter().all(|r| r.computed.is_some()));
        assert_eq!(out[1].computed.as_ref().unwrap().rho1, LaurentPoly::zero());
        let par = compute_table(&recs, Exec::default());
        let key = |v: &[KnotRecord]| v.iter().map(|r| r.computed.as_ref().unwrap().key()).collect::<Vec<_>>();
        assert_eq!(key(&out), key(&par));
    }

    #[test]
    fn header_and_duplicates() {
        assert!(read_table_from("".as_bytes()).unwrap().is_empty());
        assert!(read_table_from("name,dt\n".as_bytes()).unwrap().is_empty());
        assert!(matches!(read_table_from("knot,code\n".as_bytes()), Err(TableError::Header(_))));
        assert!(matches!(
            read_table_from("name,dt\na,4 6 2\na,4 6 2\n".as_bytes()),
            Err(TableError::DuplicateName(_))
        ));
    }

    #[test]
    fn separation_counts() {
        let recs = read_table_from("name,dt\na,4 6 2\nb,4 6 2\nc,-4 -6 -2\nd,3 5\n".as_bytes()).unwrap();
        let out = compute_table(&recs, Exec::Sequential);
        assert!(out[3].error.is_some());
        let rep = separation(&out, false);
        assert_eq!((rep.total_knots, rep.distinct_values, rep.deficit), (3, 2, 1));
        assert_eq!(rep.collision_classes, vec![vec!["a".to_string(), "b".to_string()]]);
        let rep = separation(&out, true);
        assert_eq!((rep.total_knots, rep.distinct_values, rep.deficit), (3, 1, 2));
        let single = separation(&out[..1], false);
        assert_eq!((single.distinct_values, single.deficit), (1, 0));
    }
}
