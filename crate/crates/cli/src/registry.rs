//! The static experiment registry.

use std::time::Instant;

use crate::config::{ExperimentConfig, Param, ParamKind};
use crate::error::{CliError, CliResult};
use crate::experiments as ex;
use crate::report::{ExperimentReport, Outcome};

pub struct Experiment {
    pub name: &'static str,
    /// What the experiment reproduces; listed verbatim in `docs/experiments.md`.
    pub anchor: &'static str,
    pub runtime: &'static str,
    pub params: &'static [Param],
    pub run: fn(&ExperimentConfig) -> CliResult<Outcome>,
}

impl std::fmt::Debug for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Experiment").field("name", &self.name).finish()
    }
}

impl PartialEq for Experiment {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

const fn p(key: &'static str, default: &'static str, kind: ParamKind, help: &'static str) -> Param {
    Param { key, default, kind, help }
}

use ParamKind::{Count, Counts, Real, Reals, Text};

pub static REGISTRY: &[Experiment] = &[
    Experiment {
        name: "kp-growth",
        anchor: "triangular truncation is unbounded on matrix algebras: ‖T(A_n)‖/‖A_n‖ grows like log n",
        runtime: "~2 s",
        params: &[
            p("n_list", "4,8,16,32,64,128,256,512,1024", Counts, "matrix sizes"),
            p("norm_bound", "pi", Real, "bound on ‖A_n‖"),
            p("r2_min", "0.99", Real, "least R² of the ratio against log n over n ≥ 16"),
        ],
        run: ex::kp_growth,
    },
    Experiment {
        name: "isometry",
        anchor: "triangular truncation preserves the Poisson–Schur mean oscillation S_t|A|² − |S_tA|²",
        runtime: "~1 s",
        params: &[
            p("dim", "16", Count, "matrix size"),
            p("samples", "200", Count, "random matrices"),
            p("t_count", "40", Count, "log-spaced times in [1e-3, 1e2]"),
            p("tol", "1e-12", Real, "bound on defect/‖A‖²"),
        ],
        run: ex::isometry,
    },
    Experiment {
        name: "schoenberg",
        anchor: "Schoenberg: ψ is conditionally negative iff e^{−tψ} is positive definite for every t > 0",
        runtime: "~2 s",
        params: &[
            p("planar_max", "20", Count, "largest ℤ_n with the planar cocycle"),
            p("word_max", "12", Count, "largest ℤ_n with word length"),
            p("symmetric_max", "4", Count, "largest S_n with the permutation cocycle"),
            p("min_corpus", "50", Count, "least number of length functions"),
            p("tol", "1e-9", Real, "eigenvalue tolerance of both tests"),
        ],
        run: ex::schoenberg,
    },
    Experiment {
        name: "gamma2-bakry",
        anchor: "Γ(f,f) ≥ 0 and the Bakry chain Γ(S_tf,S_tf) ≤ S_tΓ(f,f), 2S_t|S_tf|² ≤ S_{2t}|f|² + |S_{2t}f|²",
        runtime: "~20 s",
        params: &[
            p(
                "carriers",
                "poisson_schur:8;cyclic_planar:12;symmetric_permutation:4;cyclic_planar:3*cyclic_planar:4",
                Text,
                "';'-separated carriers",
            ),
            p("samples", "200", Count, "random elements per carrier"),
        ],
        run: ex::gamma2_bakry,
    },
    Experiment {
        name: "square-functions",
        anchor: "closed forms: bmo_c(λ(g)) = 1, bmo(diagonal) = 0, G(λ(g)) = S(λ(g)) = 𝟏/√2",
        runtime: "< 1 s",
        params: &[
            p("group", "cyclic_planar:8", Text, "group carrier for the character checks"),
            p("schur_dim", "6", Count, "size of the diagonal-matrix check"),
            p("samples", "20", Count, "random diagonal matrices"),
            p("t_count", "80", Count, "times per character grid"),
            p("bmo_tol", "1e-6", Real, "tolerance on bmo_c(λ(g)) = 1"),
            p("square_tol", "1e-8", Real, "tolerance on the square functions"),
        ],
        run: ex::square_functions,
    },
    Experiment {
        name: "bmo-equivalence",
        anchor: "BMO_c(f) ≈ bmo_c(f) + sup_t ‖S_tf − S_{2t}f‖∞",
        runtime: "~10 s",
        params: &[
            p("carriers", "poisson_schur:6;cyclic_planar:8;symmetric_permutation:3", Text, "';'-separated carriers"),
            p("samples", "200", Count, "random elements per carrier"),
            p("band_lo", "0.1", Real, "lower end of the admissible band"),
            p("band_hi", "10", Real, "upper end of the admissible band"),
            p("drift_max", "0.05", Real, "relative band drift allowed under grid refinement"),
        ],
        run: ex::bmo_equivalence,
    },
    Experiment {
        name: "impower",
        anchor: "imaginary powers L^{iu}: L₂ isometry and L_p lower bounds against max{p, p′}u^{−|1/2−1/p|}e^{πu|1/2−1/p|}",
        runtime: "~5 s",
        params: &[
            p("carrier", "cyclic_planar:12", Text, "carrier"),
            p("p_list", "1.5,4", Reals, "exponents"),
            p("u_list", "1,2,4,8", Reals, "imaginary orders; the first calibrates C"),
            p("samples", "500", Count, "random elements"),
            p("l2_tol", "1e-12", Real, "tolerance of the L₂ isometry"),
        ],
        run: ex::impower,
    },
    Experiment {
        name: "riesz",
        anchor: "Riesz transforms: ‖Γ(f,f)^{1/2}‖₂ = ‖L^{1/2}f‖₂ and Σ_j ‖R_{e_j}λ(g)‖₂² = 1",
        runtime: "~2 s",
        params: &[
            p("carriers", "cyclic_planar:12;symmetric_permutation:3", Text, "';'-separated cocycle carriers"),
            p("samples", "200", Count, "random kernel-free elements"),
            p("p_report", "1.5,4", Reals, "exponents whose ratio band is reported"),
            p("tol", "1e-10", Real, "tolerance of both identities"),
        ],
        run: ex::riesz,
    },
    Experiment {
        name: "markov-metric",
        anchor: "Markov metric lemma: ‖f‖_{BMO(𝒮)} ≤ 2√2 (c_d(c_s + c_w))^{1/2} ‖f‖_{BMO(𝒬)}",
        runtime: "~5 s",
        params: &[
            p("n", "64", Count, "circle size N of the heat model on ℤ_N"),
            p("samples", "100", Count, "random functions"),
            p("t_min", "1e-3", Real, "smallest time"),
            p("t_max", "10", Real, "largest time"),
            p("t_count", "40", Count, "log-spaced times"),
        ],
        run: ex::markov_metric,
    },
    Experiment {
        name: "cz-extrapolation",
        anchor: "Calderón–Zygmund extrapolation: ‖Tf‖_{BMO_𝒬} ≤ (2c₂₂√c_α + c_h)‖f‖∞, and the heat mean-value identity",
        runtime: "~10 s",
        params: &[
            p("n", "64", Count, "circle size N"),
            p("samples", "200", Count, "random functions"),
            p("t_min", "1e-3", Real, "smallest time"),
            p("t_max", "10", Real, "largest time"),
            p("t_count", "40", Count, "log-spaced times"),
            p("mean_value_n", "256", Count, "circle size for the mean-value identity"),
            p("mean_value_t", "1e-3,3e-3,1e-2", Reals, "times for the mean-value identity"),
            p("mean_value_tol", "0.02", Real, "relative error allowed at mean_value_n"),
        ],
        run: ex::cz_extrapolation,
    },
    Experiment {
        name: "qmetric",
        anchor: "quantum metric: d(φ, ψ) = sup{|φ(a) − ψ(a)| : lip(a) ≤ 1}",
        runtime: "~2 s",
        params: &[
            p("carrier", "cyclic_planar:4", Text, "carrier for the pseudometric checks"),
            p("seminorm", "gamma_max", Text, "gamma_max or commutator:α"),
            p("states", "20", Count, "random state triples"),
            p("two_point", "0.3,1,4", Reals, "values of ψ(1) on ℤ_2"),
            p("oracle_pairs", "4", Count, "random state pairs on ℤ_3"),
            p("oracle_step", "1e-3", Real, "angular resolution of the ℤ_3 grid oracle"),
            p("closed_tol", "1e-6", Real, "tolerance against 2/√ψ(1)"),
            p("oracle_tol", "0.02", Real, "relative tolerance against the grid oracle"),
            p("triangle_tol", "1e-6", Real, "slack of the triangle inequality"),
        ],
        run: ex::qmetric,
    },
    Experiment {
        name: "multiplier",
        anchor: "ε-modified Hörmander–Mihlin certificate and the helix identity ‖b(ξ)‖² = 4sin²(παξ) + 4sin²(πβξ)",
        runtime: "~3 s",
        params: &[
            p("d", "4", Count, "dimension of the cocycle space"),
            p("gamma", "0.25", Real, "exponent of the truncated |ξ|^{2γ}"),
            p("epsilon", "0.4", Real, "ε for the truncated power"),
            p("u", "1", Real, "order of |ξ|^{iu}"),
            p("epsilon_iu", "0.1,0.3", Reals, "ε values at which |ξ|^{iu} must fail"),
            p("helix_samples", "1000", Count, "random ξ for the helix identity"),
            p("helix_alpha", "1", Real, "first helix frequency"),
            p("helix_beta", "1.4142135623730951", Real, "second helix frequency"),
            p("helix_tol", "1e-12", Real, "tolerance of the helix identity"),
        ],
        run: ex::multiplier,
    },
];

/// Finds an experiment, suggesting the nearest name on a miss.
pub fn lookup(name: &str) -> CliResult<&'static Experiment> {
    REGISTRY.iter().find(|e| e.name == name).ok_or_else(|| CliError::UnknownExperiment {
        name: name.to_string(),
        suggestion: nearest(name).map(str::to_string),
    })
}

fn nearest(name: &str) -> Option<&'static str> {
    REGISTRY
        .iter()
        .map(|e| (strsim::damerau_levenshtein(name, e.name), e.name))
        .min()
        .filter(|(d, n)| *d <= n.len().max(3) / 2 + 1)
        .map(|(_, n)| n)
}

/// Runs one experiment and assembles its report.
pub fn run(config: &ExperimentConfig) -> CliResult<ExperimentReport> {
    let start = Instant::now();
    let outcome = (config.experiment().run)(config)?;
    Ok(ExperimentReport::new(
        config.experiment().name,
        config.echo(),
        outcome,
        start.elapsed().as_secs_f64(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_consistent() {
        assert!(REGISTRY.len() >= 11);
        for (i, e) in REGISTRY.iter().enumerate() {
            assert!(REGISTRY[..i].iter().all(|o| o.name != e.name));
            assert!(ExperimentConfig::defaults(e.name).is_ok(), "{}", e.name);
        }
    }

    #[test]
    fn suggestions() {
        match lookup("kp-grwoth") {
            Err(CliError::UnknownExperiment { suggestion, .. }) => assert_eq!(suggestion.as_deref(), Some("kp-growth")),
            other => panic!("{other:?}"),
        }
        match lookup("zzzzzzzzzzzzzzzzzzzz") {
            Err(CliError::UnknownExperiment { suggestion, .. }) => assert!(suggestion.is_none()),
            other => panic!("{other:?}"),
        }
        assert!(lookup("riesz").is_ok());
    }
}
