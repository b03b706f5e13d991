//! Statistical Difference: decide whether the output distributions of two
//! samplers `P_0, P_1 : {0,1}^n -> {0,1}^m` are close or far apart.
//!
//! The solver prepares `sum_{b,x} |b>|x>|P_b(x)>` (plus a hash register
//! `|h_b(x)>` in the general case), juggles the `(b, x)` register, and
//! answers "near" as soon as the hidden variable shows both values of `b`
//! at the checkpoints of a single batch. When the distributions are far
//! apart the tag registers pin the variable to one branch, so an
//! indifferent theory can never show both.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::hashing::draw_vv_hash;
use super::juggle::{default_attempts, values_per_batch, JugglePlan};
use crate::error::{Error, Result};
use crate::history::{sample_history, HistoryQuery, SamplerOptions};
use crate::qsim::{FunctionKind, Gate, OracleFunction, ProgramBuilder, Register, SlicedProgram};
use crate::rng::substream;
use crate::theories::TheoryKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Near,
    Far,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Near => "near",
            Verdict::Far => "far",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "near" => Ok(Verdict::Near),
            "far" => Ok(Verdict::Far),
            other => Err(Error::Config(format!("unknown verdict `{other}`"))),
        }
    }
}

/// Shape of the samplers produced by [`generate_instance`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceFamily {
    /// Injective samplers into `n + 1` bits.
    OneToOne,
    /// Two-to-one samplers into `n` bits.
    ManyToOne,
}

/// A pair of samplers with its ground-truth label. The label is metadata
/// for scoring and is never read by the solvers.
#[derive(Clone, Debug)]
pub struct SdInstance {
    pub id: String,
    pub n: usize,
    pub out_bits: usize,
    pub p0: Arc<OracleFunction>,
    pub p1: Arc<OracleFunction>,
    pub truth: Verdict,
}

impl SdInstance {
    pub fn new(
        id: impl Into<String>,
        p0: OracleFunction,
        p1: OracleFunction,
        truth: Verdict,
    ) -> Result<Self> {
        if p0.input_bits != p1.input_bits || p0.output_bits != p1.output_bits {
            return Err(Error::InvalidInstance("samplers disagree on widths".into()));
        }
        Ok(SdInstance {
            id: id.into(),
            n: p0.input_bits,
            out_bits: p0.output_bits,
            p0: Arc::new(p0),
            p1: Arc::new(p1),
            truth,
        })
    }

    pub fn sampler(&self, b: usize) -> &OracleFunction {
        if b == 0 {
            &self.p0
        } else {
            &self.p1
        }
    }

    /// `||Lambda_0 - Lambda_1||` for uniform inputs.
    pub fn variation_distance(&self) -> f64 {
        variation_distance(&self.p0, &self.p1)
    }

    pub fn is_injective(&self) -> bool {
        [&self.p0, &self.p1].iter().all(|p| {
            let d = output_distribution(p);
            d.values()
                .all(|&w| w <= 1.0 / (1u64 << p.input_bits) as f64 + 1e-15)
        })
    }
}

/// Law of `f(x)` for `x` uniform on `{0,1}^n`.
///
/// Graph relabelling samplers depend on `x` only through `x mod m!`, so
/// their law is computed per permutation rank with the matching weight.
pub fn output_distribution(f: &OracleFunction) -> BTreeMap<u64, f64> {
    let total = 1u64 << f.input_bits;
    let mut d = BTreeMap::new();
    match &f.function {
        FunctionKind::GraphRelabel { vertices, .. } => {
            let period = crate::combinatorics::factorial(*vertices);
            for r in 0..period.min(total) {
                // number of x < total with x mod period == r
                let count = (total - r).div_ceil(period);
                *d.entry(f.eval(r)).or_insert(0.0) += count as f64 / total as f64;
            }
        }
        _ => {
            for x in 0..total {
                *d.entry(f.eval(x)).or_insert(0.0) += 1.0 / total as f64;
            }
        }
    }
    d
}

pub fn variation_distance(p0: &OracleFunction, p1: &OracleFunction) -> f64 {
    let (d0, d1) = (output_distribution(p0), output_distribution(p1));
    let mut keys: Vec<u64> = d0.keys().chain(d1.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    0.5 * keys
        .iter()
        .map(|k| (d0.get(k).unwrap_or(&0.0) - d1.get(k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

fn random_permutation<R: Rng + ?Sized>(size: usize, rng: &mut R) -> Vec<u64> {
    let mut v: Vec<u64> = (0..size as u64).collect();
    v.shuffle(rng);
    v
}

/// Instance at the extremes: variation distance exactly 0 (near) or 1 (far).
pub fn generate_instance(
    family: InstanceFamily,
    truth: Verdict,
    n: usize,
    seed: u64,
) -> Result<SdInstance> {
    generate(family, truth, n, seed, false)
}

/// Like [`generate_instance`], but one point of `P_1` is moved so the
/// distance becomes `2^-n` (near) or `1 - 2^-n` (far).
pub fn generate_boundary_instance(
    family: InstanceFamily,
    truth: Verdict,
    n: usize,
    seed: u64,
) -> Result<SdInstance> {
    generate(family, truth, n, seed, true)
}

fn generate(
    family: InstanceFamily,
    truth: Verdict,
    n: usize,
    seed: u64,
    perturb: bool,
) -> Result<SdInstance> {
    if !(1..=12).contains(&n) {
        return Err(Error::InvalidInstance(format!(
            "input width {n} outside 1..=12"
        )));
    }
    let mut rng = substream(seed, 0);
    let size = 1usize << n;
    let (out_bits, shift) = match family {
        InstanceFamily::OneToOne => (n + 1, 0),
        InstanceFamily::ManyToOne => (n, 1),
    };
    let tau = random_permutation(1 << out_bits, &mut rng);
    let pi0 = random_permutation(size, &mut rng);
    let pi1 = random_permutation(size, &mut rng);
    let half = (size >> shift) as u64;
    let (mut t0, mut t1): (Vec<u64>, Vec<u64>) = match truth {
        Verdict::Far => (
            (0..size).map(|x| tau[(pi0[x] >> shift) as usize]).collect(),
            (0..size)
                .map(|x| tau[(half + (pi1[x] >> shift)) as usize])
                .collect(),
        ),
        Verdict::Near => {
            let t0: Vec<u64> = (0..size).map(|x| tau[(pi0[x] >> shift) as usize]).collect();
            let t1 = (0..size).map(|x| t0[pi1[x] as usize]).collect();
            (t0, t1)
        }
    };
    if perturb {
        let x = rng.random_range(0..size);
        match truth {
            // move one point of P_1 to a value outside both ranges
            Verdict::Near => t1[x] = tau[half as usize],
            // move one point of P_1 onto P_0's range
            Verdict::Far => t1[x] = t0[rng.random_range(0..size)],
        }
    }
    if rng.random_bool(0.5) {
        std::mem::swap(&mut t0, &mut t1);
    }
    let kind = match family {
        InstanceFamily::OneToOne => "1to1",
        InstanceFamily::ManyToOne => "2to1",
    };
    let edge = if perturb { "-edge" } else { "" };
    SdInstance::new(
        format!("sd-{kind}-{truth}{edge}-n{n}-s{seed}"),
        OracleFunction::from_table("P0", n, out_bits, t0)?.as_query(),
        OracleFunction::from_table("P1", n, out_bits, t1)?.as_query(),
        truth,
    )
}

/// Repetition constants of the solvers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SdParams {
    /// Independent prepare/juggle/uncompute rounds.
    pub batches: usize,
    /// Juggle attempts per batch; `None` means `2 l^2` with `l = n + 1`.
    pub attempts: Option<usize>,
}

impl SdParams {
    pub fn one_to_one() -> Self {
        SdParams {
            batches: 2,
            attempts: None,
        }
    }

    pub fn general() -> Self {
        SdParams {
            batches: 24,
            attempts: None,
        }
    }

    fn attempts_for(&self, l: usize) -> usize {
        self.attempts.unwrap_or_else(|| default_attempts(l))
    }
}

/// Qubit assignment of the solver programs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SdLayout {
    pub qubits: usize,
    /// Branch bit `b` (qubit 0).
    pub b: Register,
    /// `(b, x)`, the juggled register.
    pub bx: Register,
    pub image: Register,
    /// Hash register, `n + 1` qubits wide; a batch uses its lowest `k`.
    pub hash: Option<Register>,
}

impl SdLayout {
    pub fn new(n: usize, out_bits: usize, hashed: bool) -> Self {
        let image = Register::range(n + 1, out_bits);
        let hash = hashed.then(|| Register::range(n + 1 + out_bits, n + 1));
        SdLayout {
            qubits: n + 1 + out_bits + if hashed { n + 1 } else { 0 },
            b: Register::range(0, 1),
            bx: Register::range(0, n + 1),
            image,
            hash,
        }
    }

    pub fn tags(&self) -> Vec<Register> {
        std::iter::once(self.image.clone())
            .chain(self.hash.clone())
            .collect()
    }
}

/// `(b, x) -> P_b(x)` as one oracle on the `(b, x)` register.
fn joint_sampler(inst: &SdInstance) -> Result<OracleFunction> {
    let table = (0..1u64 << (inst.n + 1))
        .map(|v| inst.sampler((v & 1) as usize).eval(v >> 1))
        .collect();
    Ok(OracleFunction::from_table("P", inst.n + 1, inst.out_bits, table)?.as_query())
}

/// Builds the solver program. Each batch prepares the tagged state, marks a
/// checkpoint, juggles `(b, x)` and uncomputes back to `|0...0>`.
pub fn build_sd_program(
    inst: &SdInstance,
    hashed: bool,
    seed: u64,
    params: &SdParams,
) -> Result<(SlicedProgram, SdLayout)> {
    let layout = SdLayout::new(inst.n, inst.out_bits, hashed);
    let l = inst.n + 1;
    let sampler = Arc::new(joint_sampler(inst)?);
    let mut builder = ProgramBuilder::new(layout.qubits);
    for batch in 0..params.batches {
        let mut rng = substream(seed, batch as u64);
        builder.set_batch(batch);
        let mut prep = vec![
            Gate::hadamards(&layout.bx),
            vec![Gate::oracle_xor(
                layout.bx.clone(),
                layout.image.clone(),
                sampler.clone(),
            )],
        ];
        if let Some(hash) = &layout.hash {
            let (k, h0, h1) = draw_vv_hash(inst.n, &mut rng);
            let table = (0..1u64 << l)
                .map(|v| {
                    if v & 1 == 0 {
                        h0.eval(v >> 1)
                    } else {
                        h1.eval(v >> 1)
                    }
                })
                .collect();
            let h = OracleFunction::from_table("h", l, k, table)?;
            let out = Register::new(hash.qubits()[..k].to_vec());
            prep.push(vec![Gate::oracle_xor(layout.bx.clone(), out, h)]);
        }
        builder.slices(prep.clone());
        builder.checkpoint();
        JugglePlan::random(layout.bx.clone(), params.attempts_for(l), &mut rng)?
            .append_to(&mut builder);
        // every prep slice is self-inverse, so uncompute in reverse order
        builder.slices(prep.into_iter().rev());
    }
    Ok((builder.build()?, layout))
}

/// "near" iff some batch shows both values of `b` at its checkpoints.
pub fn decide(history: &crate::history::History, layout: &SdLayout) -> Result<Verdict> {
    let per_batch = values_per_batch(history, &layout.b)?;
    Ok(if per_batch.values().any(|set| set.len() > 1) {
        Verdict::Near
    } else {
        Verdict::Far
    })
}

/// Solver output; serializes to the verdict record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SdOutcome {
    pub instance_id: String,
    pub verdict: Verdict,
    pub batches_used: usize,
    pub queries: u64,
    pub seed: u64,
}

impl SdOutcome {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("outcome serializes")
    }
}

fn solve(
    inst: &SdInstance,
    hashed: bool,
    theory: TheoryKind,
    seed: u64,
    params: &SdParams,
    opts: &SamplerOptions,
) -> Result<SdOutcome> {
    let (program, layout) = build_sd_program(inst, hashed, seed, params)?;
    let queries = program.query_count();
    // the oracle call gets its own stream, separate from the program's draws
    let history = sample_history(
        &HistoryQuery::new(program, theory, crate::rng::substream_seed(seed, u64::MAX)),
        opts,
    )?;
    Ok(SdOutcome {
        instance_id: inst.id.clone(),
        verdict: decide(&history, &layout)?,
        batches_used: params.batches,
        queries,
        seed,
    })
}

/// Solver for injective samplers: no hash register.
pub fn solve_sd_one_to_one(
    inst: &SdInstance,
    theory: TheoryKind,
    seed: u64,
    params: &SdParams,
    opts: &SamplerOptions,
) -> Result<SdOutcome> {
    solve(inst, false, theory, seed, params, opts)
}

/// General solver: each batch draws `k` and two affine hashes and tags the
/// state with `h_b(x)` as well as `P_b(x)`.
pub fn solve_sd_general(
    inst: &SdInstance,
    theory: TheoryKind,
    seed: u64,
    params: &SdParams,
    opts: &SamplerOptions,
) -> Result<SdOutcome> {
    solve(inst, true, theory, seed, params, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_instances_respect_the_promise() {
        for family in [InstanceFamily::OneToOne, InstanceFamily::ManyToOne] {
            for seed in 0..20 {
                for n in 2..=5 {
                    let eps = 1.0 / (1 << n) as f64;
                    let near = generate_instance(family, Verdict::Near, n, seed).unwrap();
                    assert!(near.variation_distance() < 1e-12);
                    let far = generate_instance(family, Verdict::Far, n, seed).unwrap();
                    assert!((far.variation_distance() - 1.0).abs() < 1e-12);
                    let near_edge =
                        generate_boundary_instance(family, Verdict::Near, n, seed).unwrap();
                    assert!((near_edge.variation_distance() - eps).abs() < 1e-12);
                    let far_edge =
                        generate_boundary_instance(family, Verdict::Far, n, seed).unwrap();
                    assert!((far_edge.variation_distance() - (1.0 - eps)).abs() < 1e-12);
                    for inst in [&near, &far, &near_edge, &far_edge] {
                        assert_eq!(inst.is_injective(), family == InstanceFamily::OneToOne);
                    }
                }
            }
        }
    }

    #[test]
    fn uncompute_returns_to_zero() {
        let inst = generate_instance(InstanceFamily::ManyToOne, Verdict::Near, 3, 1).unwrap();
        let params = SdParams {
            batches: 2,
            attempts: Some(3),
        };
        let (p, layout) = build_sd_program(&inst, true, 5, &params).unwrap();
        assert_eq!(layout.qubits, 1 + 3 + 3 + 4);
        let s = p.final_state::<f64>().unwrap();
        assert!((s.mass(0) - 1.0).abs() < 1e-9);
        assert_eq!(p.query_count(), 4);
    }
}
