//! Worked examples behind `ontokit demo`. Each returns a report whose verdict
//! is the demo's pass/fail.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::SeedableRng;

use super::DemoName;
use crate::antidist::{hardy_construction, hardy_phase_vector, hardy_phases, pbr_overlap_witness, pbr_povm, tensor_power, tensor_power_for_overlap};
use crate::chained::chained_row;
use crate::error::{Error, Result};
use crate::models::{
    abcl_model, bell_model, beltrametti_bugajski, ks_born_quadrature, ks_restricted_quadrature, maximally_mixed_decompositions,
    ppm_natural_model, ppm_phi, qubit_zx_fragment, random_basis_fragment, spekkens_fragment, spekkens_toy_bit, BlochVector,
    Quadrature,
};
use crate::onto::{
    classify, detect_preparation_contextuality, is_maximally_psi_epistemic, measure_distance, measure_overlap, verify_reproduces,
    OntologicalModel,
};
use crate::quantum::random::random_state;
use crate::quantum::{pure_overlap, qubit, UnitVector};
use crate::report::Report;
use crate::ZERO_WEIGHT;

/// Optional knobs; each demo reads the ones it understands.
#[derive(Clone, Debug, Default)]
pub struct DemoOptions {
    pub dim: Option<usize>,
    pub overlap: Option<f64>,
    pub pairs: Option<usize>,
    pub n: Option<(usize, usize)>,
}

/// States and bases in the random fragments of the bell/abcl demos.
const RANDOM_STATES: usize = 20;
const RANDOM_BASES: usize = 20;
/// Points on the equatorial grid of the ks demo.
const KS_GRID: usize = 64;
/// Largest Hilbert dimension the pbr demo builds tensor powers in.
const PBR_MAX_POWER_DIM: usize = 16;

pub fn run_demo(name: DemoName, opts: &DemoOptions, tol: f64, seed: u64) -> Result<Report> {
    let r = match name {
        DemoName::Spekkens => spekkens(tol)?,
        DemoName::Bb => bb(tol)?,
        DemoName::Bell => bell(opts, tol, seed)?,
        DemoName::Ks => ks(tol)?,
        DemoName::Abcl => abcl(opts, tol, seed)?,
        DemoName::Ppm => ppm(opts, tol)?,
        DemoName::Pbr => pbr(opts, tol, seed)?,
        DemoName::Hardy => hardy(opts, tol, seed)?,
        DemoName::Chained => chained(opts, tol)?,
        DemoName::PbrWitness => witness(tol)?,
    };
    Ok(r.with_seed(seed))
}

fn first<'a>(model: &'a OntologicalModel, state: &str) -> Result<&'a crate::onto::EpistemicState> {
    Ok(&model.measures(state)?[0])
}

fn spekkens(tol: f64) -> Result<Report> {
    let m = spekkens_toy_bit();
    let mut r = Report::new("demo spekkens", tol);
    r.absorb("reproduces", verify_reproduces(&m, tol)?);
    r.check("distance[x+,y+]", 0.5, measure_distance(first(&m, "x+")?, first(&m, "y+")?)?);
    r.absorb("max_psi_epistemic", is_maximally_psi_epistemic(&m, tol)?);
    let c = classify(&m)?;
    r.require("not_psi_ontic", !c.psi_ontic);
    Ok(r)
}

fn bb(tol: f64) -> Result<Report> {
    let m = beltrametti_bugajski(&spekkens_fragment(), &maximally_mixed_decompositions(), true)?;
    let mut r = Report::new("demo bb", tol);
    r.absorb("reproduces", verify_reproduces(&m, tol)?);
    r.require("psi_ontic", classify(&m)?.psi_ontic);
    let contextual = detect_preparation_contextuality(&m)?;
    r.require("preparation_contextual[I/2]", contextual.iter().any(|s| s == "I/2"));
    Ok(r)
}

fn random_fragment(opts: &DemoOptions, seed: u64) -> crate::quantum::PMFragment {
    match opts.dim {
        Some(d) => random_basis_fragment(d, RANDOM_STATES, RANDOM_BASES, &mut StdRng::seed_from_u64(seed)),
        None => qubit_zx_fragment(),
    }
}

fn bell(opts: &DemoOptions, tol: f64, seed: u64) -> Result<Report> {
    let f = random_fragment(&DemoOptions { dim: Some(opts.dim.unwrap_or(2)), ..opts.clone() }, seed);
    let m = bell_model(&f)?;
    let mut r = Report::new("demo bell", tol);
    r.metric("dim", f.dim as f64);
    r.absorb("reproduces", verify_reproduces(&m, tol)?);
    r.require("psi_ontic", classify(&m)?.psi_ontic);
    Ok(r)
}

fn abcl(opts: &DemoOptions, tol: f64, seed: u64) -> Result<Report> {
    let f = random_fragment(&DemoOptions { dim: Some(opts.dim.unwrap_or(2)), ..opts.clone() }, seed);
    let (a, b) = (f.pure_vector("s0", tol)?, f.pure_vector("s1", tol)?);
    let abcl = abcl_model(&f, &a, &b)?;
    let m = &abcl.model;
    let mut r = Report::new("demo abcl", tol);
    r.metric("dim", f.dim as f64);
    r.metric("epsilon_safe", abcl.epsilon_safe);
    r.metric("epsilon_nominal", abcl.epsilon_nominal);
    r.absorb("reproduces", verify_reproduces(m, tol)?);
    let l = measure_overlap(&[first(m, &abcl.a)?, first(m, &abcl.b)?], ZERO_WEIGHT)?;
    r.metric("overlap", l);
    r.require("overlap_at_least_epsilon", abcl.epsilon_safe > 0.0 && l >= abcl.epsilon_safe - tol);
    r.require("not_psi_ontic", !classify(m)?.psi_ontic);
    Ok(r)
}

fn ks(tol: f64) -> Result<Report> {
    let mut r = Report::new("demo ks", tol);
    let psi = BlochVector::from_angles(PI / 2.0, 0.0);
    let q = Quadrature::default();
    for k in 0..KS_GRID {
        let alpha = 2.0 * PI * k as f64 / KS_GRID as f64;
        let phi = BlochVector::from_angles(PI / 2.0, alpha);
        let full = ks_born_quadrature(&psi, &phi, q)?.value;
        r.check(format!("born[{k}]"), 0.5 * (1.0 + alpha.cos()), full);
        r.check(format!("restricted[{k}]"), full, ks_restricted_quadrature(&psi, &phi, q)?.value);
    }
    Ok(r)
}

fn ppm(opts: &DemoOptions, tol: f64) -> Result<Report> {
    let d = opts.dim.unwrap_or(3);
    let m = ppm_natural_model(d)?;
    let mut r = Report::new("demo ppm", tol);
    r.metric("dim", d as f64);
    r.absorb("reproduces", verify_reproduces(&m, tol)?);
    let phis: Vec<String> = (0..d).map(ppm_phi).collect();
    let mus = phis.iter().map(|p| first(&m, p)).collect::<Result<Vec<_>>>()?;
    for j in 0..d {
        for k in j + 1..d {
            r.check(format!("distance[{},{}]", phis[j], phis[k]), 1.0 / (d as f64 - 1.0), measure_distance(mus[j], mus[k])?);
        }
    }
    r.check("overlap[all phi]", 0.0, measure_overlap(&mus, ZERO_WEIGHT)?);
    Ok(r)
}

/// `sqrt(x)|0> + sqrt(1-x)|1>` in dimension `d`.
fn overlapping_pair(d: usize, x: f64) -> Result<(UnitVector, UnitVector)> {
    let mut amps = vec![Complex64::new(0.0, 0.0); d];
    amps[0] = Complex64::new(x.sqrt(), 0.0);
    amps[1] = Complex64::new((1.0 - x).sqrt(), 0.0);
    Ok((UnitVector::basis(d, 0), UnitVector::normalized(amps)?))
}

fn pbr(opts: &DemoOptions, tol: f64, seed: u64) -> Result<Report> {
    let d = opts.dim.unwrap_or(2);
    let mut r = Report::new("demo pbr", tol);
    if let Some(pairs) = opts.pairs {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut done = 0;
        while done < pairs {
            let (a, b) = (random_state(d, &mut rng), random_state(d, &mut rng));
            if pure_overlap(&a, &b)? > 0.5 {
                continue;
            }
            r.absorb(&format!("pair{done}"), pbr_povm(&a, &b, tol)?.to_report());
            done += 1;
        }
        r.metric("pairs", pairs as f64);
        return Ok(r);
    }
    let x = opts.overlap.unwrap_or(0.5);
    if !(0.0..1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!("overlap must lie in [0, 1), got {x}")));
    }
    let n = tensor_power_for_overlap(x)?;
    r.metric("overlap", x);
    r.metric("copies", n as f64);
    r.metric("overlap_of_copies", x.powi(n as i32));
    let (a, b) = overlapping_pair(d, x)?;
    let cert = if n == 1 {
        pbr_povm(&a, &b, tol)?
    } else if d.checked_pow(n as u32).is_some_and(|dn| dn <= PBR_MAX_POWER_DIM) {
        pbr_povm(&tensor_power(&a, n)?, &tensor_power(&b, n)?, tol)?
    } else {
        // the n copies span a plane; work with an isometric image of it
        r.note(format!("{n} copies in dimension {d}: measured on the 2-dimensional span of the copies"));
        let (a, b) = overlapping_pair(2, x.powi(n as i32))?;
        pbr_povm(&a, &b, tol)?
    };
    r.absorb("antidistinguishes", cert.to_report());
    Ok(r)
}

fn hardy(opts: &DemoOptions, tol: f64, seed: u64) -> Result<Report> {
    let d = opts.dim.unwrap_or(3);
    if d < 3 {
        return Err(Error::InvalidArgument(format!("hardy needs --dim >= 3, got {d}")));
    }
    let mut r = Report::new("demo hardy", tol);
    let top = ((d as f64 - 1.0) / d as f64).sqrt();
    let uniform = UnitVector::normalized(vec![Complex64::new(1.0, 0.0); d])?;
    for (name, t) in [("phases[0]", 0.0), ("phases[top]", top)] {
        let v = hardy_phase_vector(d, &hardy_phases(d, t)?)?;
        r.check(name, t, v.inner(&uniform)?.re);
    }
    let pairs = opts.pairs.unwrap_or(1);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut done = 0;
    while done < pairs {
        let (psi, phi) = (random_state(d, &mut rng), random_state(d, &mut rng));
        if pure_overlap(&psi, &phi)? > (d as f64 - 1.0) / d as f64 {
            continue;
        }
        let h = hardy_construction(&psi, &phi, tol)?;
        r.check_residual(format!("pair{done}:fixes_psi"), 0.0, h.psi_residual, h.psi_residual);
        r.check_residual(format!("pair{done}:inner_preserved"), 0.0, h.inner_residual, h.inner_residual);
        r.absorb(&format!("pair{done}"), h.certificate.to_report());
        done += 1;
    }
    Ok(r)
}

fn chained(opts: &DemoOptions, tol: f64) -> Result<Report> {
    let (lo, hi) = opts.n.unwrap_or((1, 16));
    let dim = opts.dim.unwrap_or(2);
    let mut r = Report::new("demo chained", tol);
    for n in lo..=hi {
        let row = chained_row(n, dim, true)?;
        r.check(format!("I_N[{n}]"), row.closed_form, row.i_n);
        let res = row.max_born_residual.unwrap_or(0.0);
        r.check_residual(format!("born_table[{n}]"), 0.0, res, res);
        r.require(format!("below_bound[{n}]"), row.i_n <= row.bound);
    }
    Ok(r)
}

fn witness(tol: f64) -> Result<Report> {
    let f = qubit_zx_fragment();
    let abcl = abcl_model(&f, &qubit::zero(), &qubit::plus())?;
    let w = pbr_overlap_witness(&abcl, tol)?;
    let mut r = Report::new("demo pbr-witness", tol);
    r.metric("pair_overlap", w.pair_overlap);
    r.metric("l4", w.l4);
    r.metric("sum_precluded", w.sum_precluded);
    r.metric("max_precluded_prob", w.max_precluded_prob);
    r.require("l4_positive", w.l4 > 0.0);
    r.require("sum_at_least_l4", w.sum_precluded >= w.l4 - tol);
    // the model predicts the precluded outcomes, which quantum theory forbids
    r.require("model_violates_preclusion", !w.preclusions.verified);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_demo_passes() {
        let opts = DemoOptions::default();
        for name in [
            DemoName::Spekkens,
            DemoName::Bb,
            DemoName::Bell,
            DemoName::Ks,
            DemoName::Abcl,
            DemoName::Ppm,
            DemoName::Pbr,
            DemoName::Hardy,
            DemoName::Chained,
            DemoName::PbrWitness,
        ] {
            let r = run_demo(name, &opts, 1e-10, 7).unwrap();
            assert!(r.verified, "{name:?}: {:?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn pbr_overlap_variants() {
        for (d, x) in [(2, 0.3), (2, 0.8), (3, 0.9), (5, 0.95)] {
            let opts = DemoOptions { dim: Some(d), overlap: Some(x), ..Default::default() };
            let r = run_demo(DemoName::Pbr, &opts, 1e-10, 1).unwrap();
            assert!(r.verified, "d={d} x={x}");
        }
        let opts = DemoOptions { dim: Some(3), pairs: Some(5), ..Default::default() };
        assert!(run_demo(DemoName::Pbr, &opts, 1e-10, 1).unwrap().verified);
        let bad = DemoOptions { overlap: Some(1.0), ..Default::default() };
        assert!(run_demo(DemoName::Pbr, &bad, 1e-10, 1).is_err());
    }
}
