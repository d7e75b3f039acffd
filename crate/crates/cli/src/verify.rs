//! Self-checks runnable from the command line.

use clap::ValueEnum;
use ept_core::channels::verify_depolarizing_discretization;
use ept_core::clifford::{library_gates, verify_gate};
use ept_core::figures::table2;
use ept_core::oracle::verify_random_circuits;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Oracle,
    #[value(name = "appendixB")]
    AppendixB,
    Table2,
}

const TABLE_II: [[u128; 10]; 5] = [
    [1, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [1, 26, 13, 0, 0, 0, 0, 0, 0, 0],
    [1, 26, 325, 312, 78, 0, 0, 0, 0, 0],
    [1, 26, 325, 2600, 3510, 1716, 286, 0, 0, 0],
    [1, 26, 325, 2600, 14950, 24596, 17446, 5720, 715, 0],
];

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn oracle() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &m in &[2u32, 3, 5] {
        for n in 1..=2 {
            let gates = library_gates(n, m)?;
            let mut ok = true;
            for g in &gates {
                ok &= verify_gate(g, n, m)?;
            }
            checks.push(Check {
                name: format!("conjugation D={m} n={n}"),
                pass: ok,
                detail: format!("{} gates", gates.len()),
            });
        }
    }
    let worst = verify_random_circuits(100, 20, 1)?;
    checks.push(Check {
        name: "random circuits".into(),
        pass: worst < 1e-10,
        detail: format!("max discrepancy {worst:.2e}"),
    });
    Ok(checks)
}

fn appendix_b() -> Result<Vec<Check>> {
    [(2u32, 1usize), (2, 2), (3, 1), (3, 2), (5, 1)]
        .iter()
        .map(|&(m, n)| {
            Ok(Check {
                name: format!("uniform twirl D={m} n={n}"),
                pass: verify_depolarizing_discretization(m, n, 20)?,
                detail: "20 random states".into(),
            })
        })
        .collect()
}

fn table_two() -> Result<Vec<Check>> {
    let rows = table2()?;
    let wrong = rows
        .iter()
        .zip(TABLE_II.iter())
        .map(|(got, want)| got.iter().zip(want).filter(|(a, b)| a != b).count())
        .sum::<usize>();
    Ok(vec![Check {
        name: "accepted configurations".into(),
        pass: wrong == 0,
        detail: format!("{wrong} of 50 entries differ"),
    }])
}

/// Runs one suite, or all of them.
pub fn verify(suite: Option<Suite>) -> Result<Vec<Check>> {
    let suites = match suite {
        Some(s) => vec![s],
        None => vec![Suite::Oracle, Suite::AppendixB, Suite::Table2],
    };
    let mut out = Vec::new();
    for s in suites {
        out.extend(match s {
            Suite::Oracle => oracle()?,
            Suite::AppendixB => appendix_b()?,
            Suite::Table2 => table_two()?,
        });
    }
    Ok(out)
}
