use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{indicator, CheckRecord, LabError, RunConfig, Suite, SuiteReport, Tally};
use crate::drazin::corpus::{generate, CorpusLimits, CorpusMatrix};
use crate::drazin::*;
use crate::linalg::CMatrix;
use crate::operator::*;
use crate::structure::*;

/// Relative tolerance for the perturbation expansion, an exact identity
/// evaluated in floating point.
const EXPANSION_TOL: f64 = 1e-12;
/// Extra seed stream for random perturbations and spectral samples.
const SAMPLE_STREAM: u64 = 0x5eed_0f_5a4d;

pub fn run_suite(suite: Suite, config: &RunConfig) -> Result<SuiteReport, LabError> {
    config.validate()?;
    let records = match suite {
        Suite::Drazin => drazin_suite(config),
        Suite::Operator => operator_suite(config),
        Suite::Structure => structure_suite(config),
        Suite::All => {
            let mut r = drazin_suite(config);
            r.extend(operator_suite(config));
            r.extend(structure_suite(config));
            r
        }
    };
    Ok(SuiteReport::new(suite, config, records))
}

fn corpus(config: &RunConfig) -> Vec<CorpusMatrix> {
    generate(config.seed, config.corpus_size, &CorpusLimits::default())
}

fn label(m: &CorpusMatrix) -> String {
    format!("item {} (n = {}, index {})", m.meta.item, m.meta.n, m.meta.true_index)
}

fn rel(x: &CMatrix, y: &CMatrix) -> f64 {
    let s = x.norm().max(y.norm());
    if s == 0.0 {
        0.0
    } else {
        x.distance(y) / s
    }
}

fn drazin_suite(config: &RunConfig) -> Vec<CheckRecord> {
    let tol = config.tol;
    let opts = DrazinOptions::default().with_residual_tol(tol);
    let mut two_sided = Tally::new("drazin.two_sided", "two-sided relations AX = XA, X²A = X, A^{k+1}X = A^k", tol);
    let mut left = Tally::new("drazin.left_axioms", "left Drazin axioms axa = xa², x²a = x, xa^{j+1} = a^j", tol);
    let mut right = Tally::new("drazin.right_axioms", "right Drazin axioms aya = a²y, ay² = y, a^{j+1}y = a^j", tol);
    let mut oracle = Tally::new("drazin.oracle", "A^D = A^k (A^{2k+1})^+ A^k", tol);
    let mut index = Tally::new("drazin.index", "Drazin index equals ascent and descent of the power chain", 0.0);
    let mut nilpotent = Tally::new("drazin.residual_nilpotency", "a − axa is nilpotent of order at most j", tol);
    let mut round_trip =
        Tally::new("drazin.idempotent_round_trip", "p = 1 − xa recovers x = (a + p)^{-1}(1 − p)", tol);
    let mut merge = Tally::new("drazin.merge_two_sided", "left and right Drazin inverses coincide", tol);
    let mut chain_p =
        Tally::new("drazin.chain_idempotent", "spectral idempotent from kernel and range of A^k", tol);
    let mut power = Tally::new("drazin.power_lift", "x^n is a left Drazin inverse of a^n", tol);
    let mut group = Tally::new("drazin.group_lift", "group inverse of a^n lifts to a Drazin inverse of a", tol);
    let mut bc = Tally::new("drazin.bc_witness", "x = x^{j+1}a^j and xa^{j+1} = a^j", tol);
    let mut equations =
        Tally::new("drazin.matrix_equations", "solutions of the left and commuting systems agree", tol);
    let mut adjoint = Tally::new("drazin.adjoint_duality", "X* is a right Drazin inverse of A*", tol);
    let mut blocks =
        Tally::new("drazin.block_invertibility", "a invertible iff both corner compressions are", 0.0);

    for m in corpus(config) {
        let case = label(&m);
        let a = &m.a;
        let d = match drazin_inverse(a, &opts) {
            Ok(d) => d,
            Err(e) => {
                two_sided.case(&case, || Err::<Vec<_>, _>(e));
                continue;
            }
        };
        let x = &d.inverse;
        let k = d.index;
        two_sided.case(&case, || Ok::<_, DrazinError>(vec![("relative", d.residuals.two_sided.max_relative())]));
        left.case(&case, || Ok::<_, DrazinError>(vec![("relative", d.residuals.left.max_relative())]));
        right.case(&case, || Ok::<_, DrazinError>(vec![("relative", d.residuals.right.max_relative())]));
        oracle.case(&case, || Ok::<_, DrazinError>(vec![("deviation", d.oracle_deviation)]));
        index.case(&case, || {
            let from_chain = drazin_index(a, opts.rank_tol_for(m.meta.n))?;
            Ok::<_, DrazinError>(vec![
                ("mismatch", indicator(k == m.meta.true_index && from_chain == k)),
            ])
        });
        nilpotent.case(&case, || {
            let r = residual_nilpotency(a, x, k, &opts)?;
            Ok::<_, DrazinError>(vec![("square", r.square_identity.relative()), ("power", r.power.relative())])
        });
        round_trip.case(&case, || {
            let s = spectral_idempotent_left(a, x, &opts)?;
            let back = inverse_from_idempotent(a, &s.p, Side::Left, &opts)?;
            Ok::<_, DrazinError>(vec![
                ("idempotence", s.idempotence.relative()),
                ("commutation", s.commutation.relative()),
                ("reproduction", rel(&back.inverse, x)),
            ])
        });
        merge.case(&case, || {
            let p = chain_spectral_idempotent(a, &opts)?;
            let l = inverse_from_idempotent(a, &p, Side::Left, &opts)?;
            let r = inverse_from_idempotent(a, &p, Side::Right, &opts)?;
            let merged = merge_two_sided(a, &l.inverse, &r.inverse, l.index, &opts)?;
            Ok::<_, DrazinError>(vec![("deviation", merged.deviation)])
        });
        chain_p.case(&case, || {
            let p = chain_spectral_idempotent(a, &opts)?;
            Ok::<_, DrazinError>(vec![("deviation", p.distance(&d.idempotent) / p.norm().max(1.0))])
        });
        // With an empty core the computed powers are pure roundoff and the
        // relative residuals of the lifts carry no information.
        if m.meta.core_dim == 0 {
            power.skip();
            group.skip();
        } else {
            let n = k.max(1);
            power.case(&case, || {
                let lift = power_lift(x, a, n, k, &opts)?;
                let g = lift.group.map_or(0.0, |g| g.max_relative());
                Ok::<_, DrazinError>(vec![("axioms", lift.residuals.max_relative()), ("group", g)])
            });
            group.case(&case, || {
                let xn = drazin_inverse(&a.pow(n), &opts)?;
                let lift = group_lift(a, &xn.inverse, n, &opts)?;
                Ok::<_, DrazinError>(vec![("axioms", lift.residuals.max_relative())])
            });
        }
        bc.case(&case, || {
            let w = bc_witness(a, x, k, &opts)?;
            Ok::<_, DrazinError>(vec![("membership", w.membership.relative()), ("absorption", w.absorption.relative())])
        });
        equations.case(&case, || {
            let r = matrix_equation_equivalence(a, &opts)?;
            Ok::<_, DrazinError>(vec![("deviation", r.deviation)])
        });
        adjoint.case(&case, || {
            let r = adjoint_duality(a, x, k, &opts)?;
            Ok::<_, DrazinError>(vec![("relative", r.residuals.max_relative())])
        });
        blocks.case(&case, || {
            let id = CMatrix::identity(m.meta.n);
            let mut ok = true;
            for p in [d.idempotent.clone(), &id - &d.idempotent] {
                ok &= idempotent_block_invertibility(a, &p, &opts)?.consistent();
            }
            Ok::<_, DrazinError>(vec![("inconsistent", indicator(ok))])
        });
    }
    [
        two_sided, left, right, oracle, index, nilpotent, round_trip, merge, chain_p, power, group, bc, equations,
        adjoint, blocks,
    ]
    .into_iter()
    .map(Tally::finish)
    .collect()
}

fn slug(name: &str) -> String {
    let mut out = String::new();
    for ch in name.chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

/// `‖T₂ⁿ e₁‖` by repeated exact application against `1/n!` with `n!` an
/// exact integer.
pub(crate) fn harmonic_orbit_deviation(n_max: u64) -> f64 {
    let t2 = make_shift(Direction::Right, Weights::harmonic());
    let mut v = SeqVec::basis(1);
    let mut worst: f64 = 0.0;
    for n in 1..=n_max {
        v = t2.apply(&v);
        let factorial: u64 = (1..=n).product();
        let want = 1.0 / factorial as f64;
        worst = worst.max((v.norm() - want).abs() / want);
    }
    worst
}

fn operator_suite(config: &RunConfig) -> Vec<CheckRecord> {
    let n = config.window;
    let mut records = Vec::new();
    let b1 = match example_b1(n) {
        Ok(b) => b,
        Err(e) => {
            let mut t = Tally::new("operator.b1", "T = T₁ ⊕ T₂ with S₁ = L ⊕ 0", 0.0);
            t.case("construction", || Err::<Vec<_>, _>(e));
            return vec![t.finish()];
        }
    };
    for check in &b1.checks {
        let mut t = Tally::new(&format!("operator.b1.{}", slug(&check.name)), "T = T₁ ⊕ T₂ with S₁ = L ⊕ 0", 0.0);
        t.case(&format!("e_1..e_{n}"), || Ok::<_, OperatorError>(vec![("deviation", check.deviation)]));
        records.push(t.finish());
    }
    let mut t = Tally::new("operator.b1.tp_quasinilpotent", "TP = 0 ⊕ T₂ is quasi-nilpotent", 0.0);
    t.case("n = 2..60", || {
        let c = &b1.tp_certificate;
        Ok::<_, OperatorError>(vec![
            ("root_60_above_0.05", (c.root_at(60).unwrap_or(f64::INFINITY) - 0.05).max(0.0)),
            ("verdict", indicator(c.verdict)),
        ])
    });
    records.push(t.finish());
    let mut t = Tally::new("operator.b1.left_inverse", "T + P = T₁ ⊕ (I + T₂) is left invertible", 0.0);
    t.case(&format!("e_1..e_{n}"), || {
        let excess = (b1.left_inverse_residual - b1.data.c_defect - ARITHMETIC_TOL).max(0.0);
        Ok::<_, OperatorError>(vec![("excess_over_certified_defect", excess)])
    });
    records.push(t.finish());
    let mut t = Tally::new("operator.b1.not_invertible", "e₁ ⊕ 0 is orthogonal to the range of T + P", 0.0);
    t.case("first block", || Ok::<_, OperatorError>(vec![("coefficient", b1.non_invertibility.max_coefficient)]));
    records.push(t.finish());

    let mut t = Tally::new("operator.harmonic_orbit", "T₂ⁿe₁ = e_{n+1}/n!", 1e-12);
    t.case("n = 1..20", || Ok::<_, OperatorError>(vec![("relative", harmonic_orbit_deviation(20))]));
    records.push(t.finish());

    let mut t = Tally::new("operator.resolvent", "left resolvent series inside |λ| < 1/‖c‖", 0.0);
    let shift = LeftGdData::unilateral_shift();
    t.case("T₁, λ = 0.25, K = 64", || {
        let r = left_resolvent(&shift, Complex64::new(0.25, 0.0), 64, n.min(64))?;
        let geometric = 0.25f64.powi(65) / 0.75;
        Ok::<_, OperatorError>(vec![
            ("excess_over_bound", (r.max_residual - r.bound - r.roundoff - ARITHMETIC_TOL).max(0.0)),
            ("bound_above_geometric", (r.bound - geometric).max(0.0)),
        ])
    });
    for j in 0..8 {
        let lambda = Complex64::from_polar(0.2, std::f64::consts::TAU * j as f64 / 8.0);
        t.case(&format!("T₁ ⊕ T₂, λ = {lambda:.3}"), || {
            let r = left_resolvent(&b1.data, lambda, 64, n.min(64))?;
            Ok::<_, OperatorError>(vec![(
                "excess_over_bound",
                (r.max_residual - r.bound - r.roundoff - ARITHMETIC_TOL).max(0.0),
            )])
        });
    }
    records.push(t.finish());

    let mut t = Tally::new("operator.commutant", "wT = Tw implies wP = PwP", ARITHMETIC_TOL);
    let tt = &b1.data.t;
    let one = Complex64::new(1.0, 0.0);
    let ws: Vec<(&str, Result<BandedOp, OperatorError>)> = vec![
        ("W = I", Ok(BandedOp::identity())),
        ("W = T", Ok(tt.clone())),
        ("W = T^2", tt.pow(2)),
        ("W = 1 - 2T + 3iT^3", tt.polynomial(&[one, Complex64::new(-2.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 3.0)])),
    ];
    for (name, w) in ws {
        t.case(name, || {
            let r = commutant_invariance(tt, &b1.data.s, &w?, Side::Left, n)?;
            Ok::<_, OperatorError>(vec![("deviation", r.deviation)])
        });
    }
    records.push(t.finish());

    let mut t = Tally::new("operator.adjoint_duality", "T* is right generalized Drazin invertible", 0.0);
    t.case(&format!("e_1..e_{n}"), || {
        let residual = BandedOp::direct_sum(&[BandedOp::zero(), b1.t2.clone()])?;
        let r = operator_adjoint_duality(tt, &b1.data.s, Some(&residual), n)?;
        let cert = r.residual_certificate.as_ref().is_some_and(|c| c.verdict);
        Ok::<_, OperatorError>(vec![
            ("weak_commute", r.weak_commute),
            ("inner", r.inner),
            ("adjoint_residual_not_quasinilpotent", indicator(cert)),
        ])
    });
    records.push(t.finish());

    let mut t = Tally::new("operator.quasipolar", "q = ST and b = qSq from a left gD inverse", ARITHMETIC_TOL);
    t.case(&format!("e_1..e_{n}"), || {
        let r = quasipolar_left_witness(tt, &b1.data.s, n)?;
        Ok::<_, OperatorError>(vec![("deviation", r.max_deviation())])
    });
    records.push(t.finish());

    let mut t = Tally::new("operator.uniqueness", "left and right gD inverses coincide", ARITHMETIC_TOL);
    t.case(&format!("e_1..e_{n}"), || {
        let u = uniqueness_example(n)?;
        Ok::<_, OperatorError>(vec![
            ("left_weak_commute", u.left_weak_commute),
            ("left_inner", u.left_inner),
            ("right_weak_commute", u.right_weak_commute),
            ("right_inner", u.right_inner),
            ("deviation", u.deviation),
        ])
    });
    records.push(t.finish());
    records
}

fn rank_one(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let mut draw = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let u: Vec<Complex64> = (0..n).map(|_| draw()).collect();
    let v: Vec<Complex64> = (0..n).map(|_| draw()).collect();
    let entries = (0..n).flat_map(|i| v.iter().map(|vj| u[i] * vj.conj()).collect::<Vec<_>>()).collect();
    CMatrix::new(n, n, entries).expect("n ≥ 1")
}

fn structure_suite(config: &RunConfig) -> Vec<CheckRecord> {
    let tol = config.tol;
    let opts = DrazinOptions::default().with_residual_tol(tol);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ SAMPLE_STREAM);
    let mut chains = Tally::new("structure.ascent_descent", "asc = dsc = ind and dis from the meet chain", 0.0);
    let mut kaashoek = Tally::new("structure.kaashoek", "α_{k+1} − α_k = dim(N(A) ∩ R(A^k)) and dual", 0.0);
    let mut bf = Tally::new("structure.bf_index", "B-Fredholm index vanishes for n ≥ dis", 0.0);
    let mut kato = Tally::new("structure.kato", "A = A|K(A) ⊕ A|H₀(A), invertible ⊕ nilpotent", 0.0);
    let mut decomposition = Tally::new("structure.decomposition_index", "ind(A) = ind(A|K(A))", 0.0);
    let mut expansion = Tally::new("structure.perturbation", "(T+F)ⁿ = Tⁿ + F₁ with rank F₁ ≤ n rank F", EXPANSION_TOL);
    let mut stability = Tally::new("structure.index_stability", "ind(T) = ind(T + F) for finite rank F", 0.0);
    let mut spectra = Tally::new("structure.spectra", "λ − A is Drazin invertible for every λ", tol);

    for m in corpus(config) {
        let case = label(&m);
        let a = &m.a;
        let n = m.meta.n;
        let report = match chain_report(a, default_structural_tol(n)) {
            Ok(r) => r,
            Err(e) => {
                chains.case(&case, || Err::<Vec<_>, _>(e));
                continue;
            }
        };
        chains.case(&case, || {
            let truth = m.meta.true_index;
            Ok::<_, StructureError>(vec![
                ("mismatch", indicator(report.asc == truth && report.dsc == truth && report.dis == truth)),
                ("core_dim", indicator(report.rank[report.dsc] == m.meta.core_dim)),
            ])
        });
        kaashoek.case(&case, || {
            Ok::<_, StructureError>(vec![("violations", report.kaashoek_violations().len() as f64)])
        });
        bf.case(&case, || {
            let mut nonzero = 0;
            for k in report.dis..=report.k_max {
                if bf_index_from(&report, k)?.index != 0 {
                    nonzero += 1;
                }
            }
            Ok::<_, StructureError>(vec![("nonzero", nonzero as f64)])
        });
        kato.case(&case, || {
            let k = kato_decomposition(a, tol)?;
            Ok::<_, StructureError>(vec![
                ("inconsistent", indicator(k.is_consistent(n))),
                ("dimension_gap", (k.dim_m + k.dim_n).abs_diff(n) as f64),
            ])
        });
        decomposition.case(&case, || {
            let d = decomposition_index_equality(a)?;
            Ok::<_, StructureError>(vec![("unequal", indicator(d.equal()))])
        });
        if n >= 2 {
            let f = rank_one(n, &mut rng);
            expansion.case(&case, || {
                let p = perturb_expand(a, &f, m.meta.true_index.max(1))?;
                Ok::<_, StructureError>(vec![
                    ("relative", p.expansion_residual.relative()),
                    ("rank_bound", indicator(p.rank_f1 <= p.n * p.rank_f)),
                ])
            });
            stability.case(&case, || {
                let s = index_stability(a, &f)?;
                Ok::<_, StructureError>(vec![("unequal", indicator(s.equal()))])
            });
        } else {
            expansion.skip();
            stability.skip();
        }
        let samples: Vec<Complex64> =
            (0..4).map(|_| Complex64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0))).collect();
        spectra.case(&case, || {
            let r = spectra_scan(a, &samples, &opts)?;
            let errors = r.entries.iter().filter(|e| e.error.is_some()).count();
            Ok::<_, StructureError>(vec![("relative", r.worst_residual()), ("errors", errors as f64)])
        });
    }
    [chains, kaashoek, bf, kato, decomposition, expansion, stability, spectra]
        .into_iter()
        .map(Tally::finish)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs() {
        assert_eq!(slug("T S1 T = S1 T^2"), "t_s1_t_s1_t_2");
        assert_eq!(slug("T + P = T1 + (I + T2)"), "t_p_t1_i_t2");
    }

    fn run(suite: Suite, corpus_size: usize) -> SuiteReport {
        let config = RunConfig {
            seed: 1,
            corpus_size,
            ..RunConfig::default()
        };
        run_suite(suite, &config).unwrap()
    }

    #[test]
    fn drazin_suite_passes_with_many_kinds() {
        let r = run(Suite::Drazin, 10);
        assert!(r.passed(), "{}", r.to_text());
        assert!(r.kinds() >= 12);
        assert!(r.records.iter().all(|c| !c.anchor.is_empty()));
    }

    #[test]
    fn operator_suite_is_exact_on_the_window() {
        let r = run(Suite::Operator, 1);
        assert!(r.passed(), "{}", r.to_text());
        for c in r.records.iter().filter(|c| c.id.starts_with("operator.b1.")) {
            assert!(c.residuals.values().all(|&v| v == 0.0), "{c:?}");
        }
    }

    #[test]
    fn all_is_the_sum_of_its_parts() {
        let parts: Vec<_> = [Suite::Drazin, Suite::Operator, Suite::Structure].map(|s| run(s, 1)).into();
        let all = run(Suite::All, 1);
        assert!(all.passed(), "{}", all.to_text());
        assert_eq!(all.summary.checks, parts.iter().map(|p| p.summary.checks).sum::<usize>());
        assert_eq!(all.summary.passed, parts.iter().map(|p| p.summary.passed).sum::<usize>());
    }

    #[test]
    fn invalid_configs_are_refused() {
        for config in [
            RunConfig { tol: 0.0, ..RunConfig::default() },
            RunConfig { window: 7, ..RunConfig::default() },
            RunConfig { corpus_size: 0, ..RunConfig::default() },
        ] {
            assert!(matches!(run_suite(Suite::Drazin, &config), Err(LabError::Config(_))));
        }
        assert!(matches!("spectral".parse::<Suite>(), Err(LabError::UnknownSuite(_))));
    }

    #[test]
    fn orbit_oracle_is_tight() {
        assert!(harmonic_orbit_deviation(20) <= 1e-14);
    }
}
