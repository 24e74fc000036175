//! Host-orchestrated replication cycle over a stack of mRNAs. Each mRNA is a
//! BDL body plan kept as one arity-4 strand per component. A cycle builds and
//! assembles every machine from its mRNA, compares the product with
//! generation 0, then copies every strand twice.

use std::fmt;

use super::{
    body_fragment, body_program, copier_feed, run_assembler_pieces, run_builder,
    run_copier_with_feed, MachineError,
};
use crate::bdl::{parse_bdl, BdlProgram};
use crate::codons::Strand;
use crate::par;
use crate::world::canonical_text;

/// Machines on the mRNA stack, in stack order.
pub const MRNA_STACK: [&str; 4] = ["trna", "builder", "assembler", "copier"];

const STAGE_BUDGET: u64 = 200_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mrna {
    pub machine: String,
    pub strands: Vec<Strand>,
}

impl Mrna {
    pub fn text(&self) -> String {
        self.strands
            .iter()
            .map(Strand::letters)
            .collect::<Vec<_>>()
            .join("_")
    }

    fn program(&self) -> Result<BdlProgram, MachineError> {
        parse_bdl(&self.text())
            .map_err(|e| MachineError::Contract(format!("{} mRNA: {e}", self.machine)))
    }
}

/// The generation-0 stack.
pub fn initial_stack() -> Vec<Mrna> {
    MRNA_STACK
        .iter()
        .map(|name| {
            let program = body_program(name).expect("stack machines have body plans");
            let strands = program
                .to_string()
                .split('_')
                .map(|c| Strand::parse(4, c).expect("payload letters are 4-codons"))
                .collect();
            Mrna {
                machine: name.to_string(),
                strands,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineBuild {
    pub machine: String,
    pub canonical: String,
    pub matches_generation_0: bool,
    pub ticks: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generation {
    pub cycle: usize,
    pub builds: Vec<MachineBuild>,
    /// The stack after copying. An unreadable copy leaves its strand as it was.
    pub stack: Vec<Mrna>,
    /// Whether every copy spelled its generation-0 strand letter for letter.
    pub stack_identical: bool,
    pub copy_ticks: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplicationReport {
    pub generation_0: Vec<Mrna>,
    pub generations: Vec<Generation>,
    /// Differences against generation 0, empty when replication was exact.
    pub diff: Vec<String>,
}

impl ReplicationReport {
    pub fn is_exact(&self) -> bool {
        self.diff.is_empty()
    }
}

impl fmt::Display for ReplicationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.generation_0 {
            writeln!(f, "generation 0 mRNA {}: {}", m.machine, m.text())?;
        }
        for g in &self.generations {
            for b in &g.builds {
                let verdict = if b.matches_generation_0 {
                    "identical"
                } else {
                    "DIFFERENT"
                };
                writeln!(
                    f,
                    "generation {} {}: {verdict} to generation 0 ({} ticks)",
                    g.cycle, b.machine, b.ticks
                )?;
            }
            let verdict = if g.stack_identical {
                "identical"
            } else {
                "DIFFERENT"
            };
            writeln!(
                f,
                "generation {} mRNA stack: {verdict} to generation 0 ({} copier ticks)",
                g.cycle, g.copy_ticks
            )?;
        }
        for d in &self.diff {
            writeln!(f, "diff: {d}")?;
        }
        Ok(())
    }
}

fn build_one(m: &Mrna, reference: &str) -> Result<MachineBuild, MachineError> {
    let program = m.program()?;
    let built = run_builder(&program, 4, STAGE_BUDGET)?;
    let pieces: Vec<_> = built.components.into_iter().map(|c| c.blocks).collect();
    let assembled = run_assembler_pieces(&pieces, STAGE_BUDGET)?;
    Ok(MachineBuild {
        machine: m.machine.clone(),
        matches_generation_0: assembled.canonical == reference,
        canonical: assembled.canonical,
        ticks: built.ticks + assembled.ticks,
    })
}

/// Copies a strand twice. Returns the letters read (`?` marks an
/// unreadable codon) and the ticks used. A first pass with an unreadable
/// codon stops there and reports the letters its readable codons stand for.
fn copy_twice(strand: &Strand, seed: u64, mutate: bool) -> Result<(String, u64), MachineError> {
    let feed = copier_feed(4, seed, mutate)?;
    let first = run_copier_with_feed(strand, &feed, STAGE_BUDGET)?;
    let Some(negative) = first.strand(4) else {
        let positive = first
            .letters
            .chars()
            .map(|c| {
                Strand::parse(4, &c.to_string()).map_or('?', |s| s.complement().letters().remove(0))
            })
            .collect();
        return Ok((positive, first.ticks));
    };
    let feed = copier_feed(4, seed ^ 0x9e37_79b9, mutate)?;
    let second = run_copier_with_feed(&negative, &feed, STAGE_BUDGET)?;
    Ok((second.letters, first.ticks + second.ticks))
}

/// Runs `cycles` replication cycles. With `mutate`, every copier feed
/// carries one seeded mutation anticodon; the run stops at the first
/// generation whose stack differs and reports the difference.
pub fn replicate(
    cycles: usize,
    seed: u64,
    mutate: bool,
) -> Result<ReplicationReport, MachineError> {
    if cycles == 0 {
        return Err(MachineError::Unsupported(
            "replication needs at least one cycle".into(),
        ));
    }
    let generation_0 = initial_stack();
    let references: Vec<String> = MRNA_STACK
        .iter()
        .map(|n| canonical_text(&body_fragment(&body_program(n).expect("body plan"))))
        .collect();
    let mut stack = generation_0.clone();
    let mut report = ReplicationReport {
        generation_0: generation_0.clone(),
        generations: Vec::new(),
        diff: Vec::new(),
    };
    for cycle in 1..=cycles {
        let jobs: Vec<(&Mrna, &String)> = stack.iter().zip(&references).collect();
        let builds = par::map(&jobs, |(m, r)| build_one(m, r))
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
        for b in builds.iter().filter(|b| !b.matches_generation_0) {
            report.diff.push(format!(
                "generation {cycle} {} differs from generation 0",
                b.machine
            ));
        }
        let strands: Vec<(usize, usize, u64)> = stack
            .iter()
            .enumerate()
            .flat_map(|(i, m)| (0..m.strands.len()).map(move |j| (i, j)))
            .enumerate()
            .map(|(k, (i, j))| {
                (
                    i,
                    j,
                    seed.wrapping_mul(1_000_003)
                        .wrapping_add((cycle * 1000 + k) as u64),
                )
            })
            .collect();
        let copies = par::map(&strands, |(i, j, s)| {
            copy_twice(&stack[*i].strands[*j], *s, mutate)
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
        let copy_ticks = copies.iter().map(|(_, t)| t).sum();
        let mut next = stack.clone();
        let mut stack_identical = true;
        for ((i, j, _), (letters, _)) in strands.iter().zip(&copies) {
            let before = generation_0[*i].strands[*j].letters();
            if *letters != before {
                stack_identical = false;
                report.diff.push(format!(
                    "generation {cycle} {} component {}: {before} -> {letters}",
                    stack[*i].machine,
                    j + 1
                ));
            }
            if let Ok(s) = Strand::parse(4, letters) {
                next[*i].strands[*j] = s;
            }
        }
        stack = next;
        report.generations.push(Generation {
            cycle,
            builds,
            stack: stack.clone(),
            stack_identical,
            copy_ticks,
        });
        if !report.diff.is_empty() {
            break;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stack_spells_the_body_plans() {
        let texts: Vec<String> = initial_stack().iter().map(Mrna::text).collect();
        assert_eq!(
            texts,
            [
                "A_B_C_D_E_F",
                "CCC_DAACAA_DAACAA",
                "CCA_FAAAAAAF",
                "AC_AC_AAA_AACA_AAAAAB"
            ]
        );
    }

    #[test]
    fn one_cycle_is_exact() {
        let r = replicate(1, 5, false).unwrap();
        assert!(r.is_exact(), "{r}");
        assert_eq!(r.generations.len(), 1);
        assert!(r.generations[0]
            .builds
            .iter()
            .all(|b| b.matches_generation_0));
        assert_eq!(r.generations[0].stack, r.generation_0);
        assert!(r.generations[0].stack_identical);
    }

    #[test]
    fn mutation_shows_up_in_the_diff() {
        let r = (0..20)
            .map(|s| replicate(1, s, true).unwrap())
            .find(|r| !r.is_exact())
            .expect("some seed mutates");
        assert!(r.diff.iter().any(|d| d.contains('?')), "{r}");
        assert!(r.to_string().contains("DIFFERENT"));
    }

    #[test]
    fn zero_cycles_is_rejected() {
        assert!(matches!(
            replicate(0, 0, false),
            Err(MachineError::Unsupported(_))
        ));
    }
}
