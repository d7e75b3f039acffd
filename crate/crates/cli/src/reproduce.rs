//! Tidy CSV datasets behind the repeater figures and tables.

use std::io::Write;

use clap::ValueEnum;
use ept_core::figures::{
    fig4_point, fig5_point, fig5_unencoded_fidelity, fig6_sweep, table1_row, table2,
    TABLE1_PUBLISHED,
};
use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Fig4,
    Fig5,
    Fig6,
    Table1,
    Table2,
}

/// Even station counts plotted for the `[[5,1,3]]_5` line.
pub const FIG4_STATIONS: std::ops::RangeInclusive<usize> = 2..=400;
/// Loss rates `f = i / 100` for `i` in this range.
pub const FIG5_STEPS: std::ops::RangeInclusive<u32> = 0..=99;

#[derive(Serialize)]
struct Fig4Row {
    stations: usize,
    r: u32,
    s: u32,
    class: &'static str,
    probability: f64,
}

#[derive(Serialize)]
struct Fig5Row {
    f: f64,
    scheme: &'static str,
    k_max: Option<usize>,
    fidelity: f64,
    p_distr: Option<f64>,
}

#[derive(Serialize)]
struct Fig6Row {
    modulus: u32,
    distance: usize,
    physical: usize,
    log10_dim: f64,
    log_negativity: f64,
    prime: bool,
}

#[derive(Serialize)]
struct Table1Row {
    modulus: u32,
    d_min: Option<usize>,
}

#[derive(Serialize)]
struct Table2Row {
    k_max: usize,
    m: usize,
    alpha: u64,
}

fn class_of(r: u32, s: u32) -> &'static str {
    match (r == 0, s == 0) {
        (true, true) => "none",
        (false, true) => "X",
        (true, false) => "Z",
        (false, false) => "XZ",
    }
}

/// Writes the dataset of `target` as CSV.
pub fn reproduce<W: Write>(target: Target, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    match target {
        Target::Fig4 => {
            for n in FIG4_STATIONS.step_by(2) {
                let p = fig4_point(n)?;
                for r in 0..5 {
                    for s in 0..5 {
                        w.serialize(Fig4Row {
                            stations: n,
                            r,
                            s,
                            class: class_of(r, s),
                            probability: p.get(r, s),
                        })?;
                    }
                }
            }
        }
        Target::Fig5 => {
            for i in FIG5_STEPS {
                let f = i as f64 / 100.0;
                w.serialize(Fig5Row {
                    f,
                    scheme: "unencoded",
                    k_max: None,
                    fidelity: fig5_unencoded_fidelity(f)?,
                    p_distr: None,
                })?;
                for k in 0..5 {
                    let (fid, p) = fig5_point(k, f)?;
                    w.serialize(Fig5Row {
                        f,
                        scheme: "encoded",
                        k_max: Some(k),
                        fidelity: fid,
                        p_distr: Some(p),
                    })?;
                }
            }
        }
        Target::Fig6 => {
            for pt in fig6_sweep()? {
                w.serialize(Fig6Row {
                    modulus: pt.modulus,
                    distance: pt.distance,
                    physical: pt.physical,
                    log10_dim: pt.log10_dim,
                    log_negativity: pt.log_negativity,
                    prime: pt.prime,
                })?;
            }
        }
        Target::Table1 => {
            let moduli: Vec<u32> = TABLE1_PUBLISHED.iter().map(|&(m, _)| m).collect();
            for (modulus, d_min) in table1_row(&moduli)? {
                w.serialize(Table1Row { modulus, d_min })?;
            }
        }
        Target::Table2 => {
            for (k, row) in table2()?.into_iter().enumerate() {
                for (m, a) in row.into_iter().enumerate() {
                    w.serialize(Table2Row {
                        k_max: k,
                        m,
                        alpha: a as u64,
                    })?;
                }
            }
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
