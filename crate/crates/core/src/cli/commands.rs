use std::path::Path;

use num_complex::Complex64;

use super::config::Config;
use super::envelope::{Envelope, Failure};
use super::{load_config, Command, DataArgs, ModelArgs, ModelName, Report};
use crate::canonical::{CanonicalModel, DataSet};
use crate::coherent::{coherent_state, divergence_coherent, FockVector};
use crate::discrete::{boltzmann_gibbs, kl_divergence, ProbabilityVector};
use crate::error::{check_len, Error};
use crate::qubit::{bloch_to_rho, gibbs_state, quantum_relative_entropy};
use crate::regression::{regression_entropy, regression_is_perfect, regression_questions, regression_z};
use crate::sphere::{sphere_entropy, sphere_mu, sphere_questions};

type Outcome = Result<Report, Failure>;

pub(super) fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Massieu { model, theta, tol } => massieu(&model, &theta, tol),
        Command::Maxent { model, u } => maxent(&model, &u),
        Command::Divergence { model, data, theta, zeta } => divergence(&model, &data, &theta, zeta.as_deref()),
        Command::Pythagoras { model, data, theta, zeta, xi, direction, step } => {
            pythagoras(&model, &data, theta.as_deref(), &zeta, xi.as_deref(), direction.as_deref(), step)
        }
        Command::Answers { model, data, data_file, tol } => answers(&model, &data, data_file.as_deref(), tol),
        Command::Sweep { .. } | Command::Verify { .. } => unreachable!("handled by the caller"),
    }
}

pub(super) fn canonical_model(args: &ModelArgs) -> Result<(Config, CanonicalModel), Failure> {
    let cfg = load_config(args.config.as_ref())?;
    match args.model {
        ModelName::Regression | ModelName::Sphere => Err(Failure::Usage(format!(
            "model '{}' has no Massieu function; use the answers command",
            args.model.as_str()
        ))),
        name => {
            let m = cfg.canonical(name.as_str(), args.nmax)?;
            Ok((cfg, m))
        }
    }
}

fn check_dim(m: &CanonicalModel, v: &[f64]) -> Result<(), Failure> {
    check_len(m.dim(), v.len()).map_err(Failure::from)
}

fn massieu(args: &ModelArgs, theta: &[f64], tol: Option<f64>) -> Outcome {
    let (_, m) = canonical_model(args)?;
    check_dim(&m, theta)?;
    let pair = m.canonical_check(theta, tol)?;
    let mut env = Envelope::new("massieu");
    env.input("model", m.name()).input("theta", theta);
    env.output("massieu", pair.massieu)
        .output("u", &pair.u.0)
        .output("entropy", pair.entropy)
        .output("canonical_residual", pair.residual);
    let closed = m.canonical_tolerance() == crate::model::CLOSED_FORM_TOL;
    env.diagnostic("path", if closed { "closed-form" } else { "legendre" })
        .diagnostic("tolerance", tol.unwrap_or_else(|| m.canonical_tolerance()))
        .diagnostic("roundtrip_error", pair.roundtrip_error);
    Ok(Report::Document(env, args.format))
}

fn maxent(args: &ModelArgs, u: &[f64]) -> Outcome {
    let (_, m) = canonical_model(args)?;
    check_dim(&m, u)?;
    let fit = m.fit(u)?;
    let mut env = Envelope::new("maxent");
    env.input("model", m.name()).input("u", u);
    env.output("theta", &fit.theta.0).output("moments", &fit.moments.0);
    env.diagnostic("iterations", fit.iterations);
    Ok(Report::Document(env, args.format))
}

fn read_state(path: &Path) -> Result<FockVector, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("state file: {e}")))
}

fn data_set(m: &CanonicalModel, data: &DataArgs, nmax: usize) -> Result<DataSet, Failure> {
    let missing = || Failure::Usage(format!("the {} model needs a data set", m.name()));
    Ok(match m {
        CanonicalModel::Discrete(_) => {
            DataSet::Distribution(ProbabilityVector::new(data.x.clone().ok_or_else(missing)?)?)
        }
        CanonicalModel::Qubit(_) => {
            let x = data.x.as_deref().ok_or_else(missing)?;
            check_len(3, x.len())?;
            DataSet::Density(bloch_to_rho(&[x[0], x[1], x[2]])?)
        }
        CanonicalModel::Coherent(_) => match (&data.z, &data.state) {
            (Some(z), None) => {
                check_len(2, z.len())?;
                DataSet::Wave(coherent_state(Complex64::new(z[0], z[1]), nmax)?)
            }
            (None, Some(path)) => DataSet::Wave(read_state(path)?),
            (None, None) => return Err(missing()),
            _ => return Err(Failure::Usage("give either --z or --state".into())),
        },
    })
}

fn nmax_of(m: &CanonicalModel) -> usize {
    match m {
        CanonicalModel::Coherent(c) => c.nmax(),
        _ => 0,
    }
}

/// Independent evaluation of the divergence where the model has one.
fn direct_divergence(m: &CanonicalModel, x: &DataSet, theta: &[f64]) -> Result<f64, Error> {
    match (m, x) {
        (CanonicalModel::Qubit(_), DataSet::Density(rho)) => {
            quantum_relative_entropy(rho, &gibbs_state(&[theta[0], theta[1], theta[2]]))
        }
        (CanonicalModel::Discrete(d), DataSet::Distribution(p)) => kl_divergence(p, &boltzmann_gibbs(d.family(), theta)?),
        (CanonicalModel::Coherent(c), DataSet::Wave(phi)) => {
            let u = m.theta_to_u(theta)?;
            Ok(divergence_coherent(phi, &[u[0], u[1]], c.constants()))
        }
        _ => Err(Error::InvalidParameter("data set kind does not match the model".into())),
    }
}

fn divergence(args: &ModelArgs, data: &DataArgs, theta: &[f64], zeta: Option<&[f64]>) -> Outcome {
    let (_, m) = canonical_model(args)?;
    check_dim(&m, theta)?;
    let mut env = Envelope::new("divergence");
    env.input("model", m.name()).input("theta", theta);
    match (zeta, data.is_given()) {
        (Some(zeta), false) => {
            check_dim(&m, zeta)?;
            env.input("zeta", zeta);
            let u = m.theta_to_u(theta)?;
            let linear: f64 = zeta.iter().zip(theta).zip(u.iter()).map(|((z, t), u)| (z - t) * u).sum();
            env.output("divergence", m.bregman(theta, zeta)?)
                .output("massieu_theta", m.massieu(theta)?)
                .output("massieu_zeta", m.massieu(zeta)?)
                .output("linear_term", linear);
            env.diagnostic("kind", "model-model");
        }
        (None, true) => {
            let x = data_set(&m, data, nmax_of(&m))?;
            let answers = m.answers(&x)?;
            env.input("answers", &answers.questions);
            let r = m.divergence_from_data(&x, theta)?;
            env.output("divergence", r.value)
                .output("massieu_at", r.massieu_at)
                .output("entropy_of_x", r.entropy_of_x)
                .output("linear_term", r.linear_term)
                .output("direct", direct_divergence(&m, &x, theta)?);
            env.diagnostic("kind", "data-model");
        }
        (Some(_), true) => return Err(Failure::Usage("give either a data set or --zeta, not both".into())),
        (None, false) => return Err(Failure::Usage("divergence needs a data set or --zeta".into())),
    }
    Ok(Report::Document(env, args.format))
}

fn pythagoras(
    args: &ModelArgs,
    data: &DataArgs,
    theta: Option<&[f64]>,
    zeta: &[f64],
    xi: Option<&[f64]>,
    direction: Option<&[f64]>,
    step: f64,
) -> Outcome {
    let (_, m) = canonical_model(args)?;
    check_dim(&m, zeta)?;
    let mut env = Envelope::new("pythagoras");
    env.input("model", m.name()).input("zeta", zeta);
    if data.is_given() {
        if xi.is_some() || direction.is_some() {
            return Err(Failure::Usage("data-set mode takes no --xi or --direction".into()));
        }
        let x = data_set(&m, data, nmax_of(&m))?;
        let answers = m.answers(&x)?;
        let theta = match theta {
            Some(t) => {
                check_dim(&m, t)?;
                t.to_vec()
            }
            None => m.u_to_theta(&answers.questions)?.0,
        };
        env.input("theta", &theta).input("answers", &answers.questions);
        let residual = m.pythagoras_data(&x, &theta, zeta)?;
        env.output("d_x_theta", m.divergence_from_data(&x, &theta)?.value)
            .output("d_theta_zeta", m.bregman(&theta, zeta)?)
            .output("d_x_zeta", m.divergence_from_data(&x, zeta)?.value)
            .output("residual", residual);
        env.diagnostic("kind", "data-set");
    } else {
        let theta = theta.ok_or_else(|| Failure::Usage("model mode needs --theta".into()))?;
        check_dim(&m, theta)?;
        env.input("theta", theta);
        let xi = match (xi, direction) {
            (Some(xi), None) => {
                check_dim(&m, xi)?;
                xi.to_vec()
            }
            (None, Some(w)) => {
                check_dim(&m, w)?;
                env.input("direction", w).input("step", step);
                m.orthogonal_partner(theta, zeta, w, step)?.0
            }
            _ => return Err(Failure::Usage("give exactly one of --xi and --direction".into())),
        };
        let r = m.pythagoras_models(theta, zeta, &xi)?;
        env.output("xi", &xi)
            .output("orthogonality", r.orthogonality)
            .output("d_theta_zeta", r.d_theta_zeta)
            .output("d_zeta_xi", r.d_zeta_xi)
            .output("d_theta_xi", r.d_theta_xi)
            .output("residual", r.residual);
        env.diagnostic("kind", "model-points");
    }
    Ok(Report::Document(env, args.format))
}

fn answers(args: &ModelArgs, data: &DataArgs, data_file: Option<&Path>, tol: f64) -> Outcome {
    let cfg = load_config(args.config.as_ref())?;
    let mut env = Envelope::new("answers");
    env.input("model", args.model.as_str());
    match args.model {
        ModelName::Regression => {
            let d = cfg.regression_data(data_file)?;
            env.input("points", d.pairs().len());
            let line = regression_questions(&d)?;
            env.output("q_a", line.a)
                .output("q_b", line.b)
                .output("entropy", regression_entropy(&d)?)
                .output("z", regression_z(&d))
                .output("perfect", regression_is_perfect(&d, tol)?);
            env.diagnostic("tolerance", tol);
        }
        ModelName::Sphere => {
            let x = data.x.as_deref().ok_or_else(|| Failure::Usage("sphere needs --x".into()))?;
            check_len(3, x.len())?;
            let x = [x[0], x[1], x[2]];
            env.input("x", x);
            env.output("mu", sphere_mu(&x)?).output("entropy", sphere_entropy(&x)?);
            match sphere_questions(&x) {
                Ok(q) => {
                    env.output("questions", q);
                }
                Err(_) => {
                    env.diagnostic("questions", "undefined for x3 <= 0");
                }
            }
        }
        _ => {
            let (_, m) = canonical_model(args)?;
            let x = data_set(&m, data, nmax_of(&m))?;
            let a = m.answers(&x)?;
            env.output("questions", &a.questions).output("entropy", a.entropy);
        }
    }
    Ok(Report::Document(env, args.format))
}
