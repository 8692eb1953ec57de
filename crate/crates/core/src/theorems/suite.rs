use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    build_phi_thm37, check_bivariate_convex, check_corollaries, check_remark31, check_remark32,
    check_thm31, check_thm32, check_thm33, check_thm34, check_thm35, check_thm36, phi_type_check,
    BivariateBox, BivariateFn, CheckGrid, CorollaryInput, Part31, Part34, TheoremError,
    TheoremReport, Thm36Input,
};
use crate::algebra::AlphaContext;
use crate::calculus::MeshSpec;
use crate::certifier::{SearchBudget, Sense};
use crate::gallery::{make_example41, make_example42, Example41Params, Example42Params};
use crate::model::{FunctionExpr, Guard, ScalarExpr};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub alpha: f64,
    pub budget: SearchBudget,
    pub grid: CheckGrid,
    pub mesh: MeshSpec,
    pub bivariate_box: BivariateBox,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            budget: SearchBudget::default(),
            grid: CheckGrid::default(),
            mesh: MeshSpec::default(),
            bivariate_box: BivariateBox::default(),
        }
    }
}

type Job = fn(&SuiteConfig) -> Result<TheoremReport, TheoremError>;

fn ctx(cfg: &SuiteConfig, s: f64) -> Result<AlphaContext, TheoremError> {
    Ok(AlphaContext::new(cfg.alpha, s)?)
}

fn ex41(a: f64, b: f64, c: f64) -> FunctionExpr {
    make_example41(&Example41Params { a, b, c, s: 0.5 }).0
}

fn steps(levels: &[(f64, f64)], last: f64) -> FunctionExpr {
    let mut branches: Vec<(Guard, FunctionExpr)> = levels
        .iter()
        .map(|&(c, v)| (Guard::Le { c }, FunctionExpr::fv(v)))
        .collect();
    branches.push((Guard::Else, FunctionExpr::fv(last)));
    FunctionExpr::piecewise(branches)
}

fn u_pow(p: f64) -> ScalarExpr {
    ScalarExpr::power_of_u(p)
}

fn thm31(f: FunctionExpr, part: Part31, cfg: &SuiteConfig) -> Result<TheoremReport, TheoremError> {
    check_thm31(&f, part, &ctx(cfg, 0.5)?, &cfg.budget, &cfg.grid)
}

fn thm35(p: FunctionExpr, cfg: &SuiteConfig) -> Result<TheoremReport, TheoremError> {
    check_thm35(&p, 0.5, &ctx(cfg, 0.5)?, &cfg.budget, &cfg.grid)
}

fn thm36(input: Thm36Input, s1: f64, s2: f64, cfg: &SuiteConfig) -> Result<TheoremReport, TheoremError> {
    check_thm36(&input, s1, s2, &ctx(cfg, 0.5)?, &cfg.budget, &cfg.grid)
}

fn thm37(f: FunctionExpr, s: f64, cfg: &SuiteConfig) -> Result<TheoremReport, TheoremError> {
    Ok(build_phi_thm37(&f, s, &ctx(cfg, s)?, &cfg.budget, &cfg.grid, &cfg.mesh)?.report)
}

fn corpus() -> Vec<(&'static str, Job)> {
    vec![
        ("thm31a_mono_s", |c| thm31(FunctionExpr::mono_s(), Part31::A, c)),
        ("thm31a_ex41_1_1_0", |c| thm31(ex41(1.0, 1.0, 0.0), Part31::A, c)),
        ("thm31a_ex41_0_1_0", |c| thm31(ex41(0.0, 1.0, 0.0), Part31::A, c)),
        ("thm31a_ex42_k2", |c| {
            let (f, _) = make_example42(&Example42Params { k: 2.0, s: 0.5 })
                .expect("k = 2, s = 0.5 are valid parameters");
            thm31(f, Part31::A, c)
        }),
        ("thm31b_ex41_0_1_0", |c| thm31(ex41(0.0, 1.0, 0.0), Part31::B, c)),
        ("thm31b_mono_s", |c| thm31(FunctionExpr::mono_s(), Part31::B, c)),
        ("thm31b_ex41_2_1_1", |c| thm31(ex41(2.0, 1.0, 1.0), Part31::B, c)),
        ("bivariate_sum_alpha", |c| {
            Ok(check_bivariate_convex(&BivariateFn::SumAlpha, 0.5, &ctx(c, 0.5)?, &c.bivariate_box, false))
        }),
        ("bivariate_max_alpha", |c| {
            Ok(check_bivariate_convex(&BivariateFn::MaxAlpha, 0.5, &ctx(c, 0.5)?, &c.bivariate_box, false))
        }),
        ("thm32_sum_us_us", |c| {
            check_thm32(&BivariateFn::SumAlpha, &u_pow(0.5), &u_pow(0.5), &ctx(c, 0.5)?, &c.budget, &c.bivariate_box)
        }),
        ("thm32_max_us_us", |c| {
            check_thm32(&BivariateFn::MaxAlpha, &u_pow(0.5), &u_pow(0.5), &ctx(c, 0.5)?, &c.budget, &c.bivariate_box)
        }),
        ("thm32_max_us_2us", |c| {
            let g = ScalarExpr::Mul {
                lhs: Box::new(ScalarExpr::num(2.0)),
                rhs: Box::new(u_pow(0.5)),
            };
            check_thm32(&BivariateFn::MaxAlpha, &u_pow(0.5), &g, &ctx(c, 0.5)?, &c.budget, &c.bivariate_box)
        }),
        ("thm33a_mono_s", |c| check_thm33(&FunctionExpr::mono_s(), Sense::First, &ctx(c, 0.5)?, &c.budget)),
        ("thm33a_mono_s_plus_1", |c| {
            let f = FunctionExpr::sum(FunctionExpr::mono_s(), FunctionExpr::fv(1.0));
            check_thm33(&f, Sense::First, &ctx(c, 0.5)?, &c.budget)
        }),
        ("thm33b_ex41_0_1_0", |c| check_thm33(&ex41(0.0, 1.0, 0.0), Sense::Second, &ctx(c, 0.5)?, &c.budget)),
        ("thm34a_mono_s", |c| {
            check_thm34(&FunctionExpr::mono_s(), Part34::A, 0.5, 0.5, &ctx(c, 0.5)?, &c.budget)
        }),
        ("thm34b_mono_0.6", |c| {
            check_thm34(&FunctionExpr::mono(0.6), Part34::B, 0.3, 0.6, &ctx(c, 0.6)?, &c.budget)
        }),
        ("thm34c_mono_0.6", |c| {
            check_thm34(&FunctionExpr::mono(0.6), Part34::C, 0.3, 0.6, &ctx(c, 0.6)?, &c.budget)
        }),
        ("thm35_unit", |c| thm35(FunctionExpr::fv(1.0), c)),
        ("thm35_step", |c| thm35(steps(&[(1.0, 1.0)], 2.0), c)),
        ("thm35_staircase", |c| thm35(steps(&[(1.0, 1.0), (2.0, 2.0), (4.0, 3.0)], 5.0), c)),
        ("thm35_ramp", |c| thm35(FunctionExpr::mono(1.0), c)),
        ("thm36a_mono_0.5_of_sqrt", |c| {
            thm36(Thm36Input::Compose { f: FunctionExpr::mono(0.5), g: u_pow(0.5) }, 0.5, 0.5, c)
        }),
        ("thm36b_mono_0.5_squared", |c| {
            thm36(Thm36Input::Product { f: FunctionExpr::mono(0.5), g: FunctionExpr::mono(0.5) }, 0.5, 0.5, c)
        }),
        ("thm36b_mono_0.3_mono_0.6", |c| {
            thm36(Thm36Input::Product { f: FunctionExpr::mono(0.3), g: FunctionExpr::mono(0.6) }, 0.3, 0.6, c)
        }),
        ("rem33_mono_s_of_square", |c| {
            thm36(Thm36Input::ComposeSecond { f: FunctionExpr::mono_s(), g: u_pow(2.0) }, 0.5, 0.5, c)
        }),
        ("rem34_increasing", |c| {
            thm36(Thm36Input::Product { f: FunctionExpr::mono(1.0), g: FunctionExpr::mono(2.0) }, 1.0, 1.0, c)
        }),
        ("rem34_decreasing", |c| {
            let hinge = FunctionExpr::max(
                FunctionExpr::fb(0.0),
                FunctionExpr::difference(FunctionExpr::fb(1.0), FunctionExpr::mono(1.0)),
            );
            thm36(Thm36Input::Product { f: hinge.clone(), g: hinge }, 1.0, 1.0, c)
        }),
        ("rem31_affine", |c| {
            let f = FunctionExpr::difference(FunctionExpr::fb(1.0), FunctionExpr::mono(1.0));
            check_remark31(&f, &ctx(c, 1.0)?, &c.budget, &c.grid)
        }),
        ("rem32_ex41_1_1_0", |c| check_remark32(&ex41(1.0, 1.0, 0.0), &ctx(c, 0.5)?, &c.budget, &c.grid)),
        ("phi_type_mono_s", |c| phi_type_check(&FunctionExpr::mono_s(), &ctx(c, 0.5)?, &c.grid)),
        ("cor31_mono_1_of_us", |c| {
            let input = CorollaryInput::Cor31 { phi: FunctionExpr::mono(1.0), g: u_pow(0.5) };
            check_corollaries(&input, 0.5, &ctx(c, 0.5)?, &c.budget, &c.grid)
        }),
        ("cor32_mono_s_of_u", |c| {
            let input = CorollaryInput::Cor32 { phi: ScalarExpr::U, f: FunctionExpr::mono_s() };
            check_corollaries(&input, 0.5, &ctx(c, 0.5)?, &c.budget, &c.grid)
        }),
        ("cor32_mono_s_of_u2", |c| {
            let input = CorollaryInput::Cor32 { phi: u_pow(2.0), f: FunctionExpr::mono_s() };
            check_corollaries(&input, 0.5, &ctx(c, 0.5)?, &c.budget, &c.grid)
        }),
        ("thm37_mono_1", |c| thm37(FunctionExpr::mono(1.0), 0.5, c)),
        ("thm37_mono_s", |c| thm37(FunctionExpr::mono_s(), 0.5, c)),
        ("thm37_mono_0.5_s_third", |c| thm37(FunctionExpr::mono(0.5), 1.0 / 3.0, c)),
        ("thm37_mono_2", |c| thm37(FunctionExpr::mono(2.0), 0.5, c)),
    ]
}

/// Runs every check of the default corpus. Each instance is a positive
/// claim, so every report should hold.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<TheoremReport>, TheoremError> {
    corpus()
        .into_par_iter()
        .map(|(id, job)| {
            let mut r = job(cfg)?;
            r.test_id = id.to_string();
            Ok(r)
        })
        .collect()
}

fn status_label(r: &TheoremReport) -> &'static str {
    match r.conclusion_status {
        super::ConclusionStatus::Holds => "holds",
        super::ConclusionStatus::Falsified { .. } => "falsified",
        super::ConclusionStatus::HypothesisUnmet => "hypothesis_unmet",
    }
}

/// Plain-text table `theorem | test | status | citation`.
pub fn traceability_table(reports: &[TheoremReport]) -> String {
    let w_id = reports.iter().map(|r| r.theorem_id.len()).max().unwrap_or(0).max(7);
    let w_test = reports.iter().map(|r| r.test_id.len()).max().unwrap_or(0).max(4);
    let mut out = format!("{:w_id$}  {:w_test$}  {:16}  citation\n", "theorem", "test", "status");
    for r in reports {
        out.push_str(&format!(
            "{:w_id$}  {:w_test$}  {:16}  {}\n",
            r.theorem_id,
            r.test_id,
            status_label(r),
            r.citation
        ));
    }
    out
}
