//! One function per subcommand; everything writes deterministic artifacts
//! through [`RunContext`].

use crate::output::{fmt_float, parse_vec, read_inline_or_file, RunContext};
use crate::{Cli, CliError, Command};
use pharmonic::fields::{build_field, FieldDescriptor, FieldRef};
use pharmonic::geometry::DomainGeometry;
use pharmonic::linalg::{self, SquareMat};
use pharmonic::sample::Sampler;
use pharmonic::solver::{
    comparison_points, fundamental_solution, mesh_disk, mesh_sector, solve_dirichlet,
    BoundaryTag, DirichletProblem, FundamentalOptions, Mesh2D, SolverOptions,
};
use pharmonic::spectral::{
    beta_by_shooting, beta_closed_form, first_zero, quadratic_residual, tabulate,
};
use pharmonic::verify::{
    boundary_limit, ellipticity_sample, plaplace_residual, spherical_residual_3d,
    transformed_coefficients,
};
use serde_json::json;
use std::f64::consts::PI;
use std::sync::Arc;

pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let desc = format!("{:?}", cli.command);
    let ctx = RunContext::new(&cli.out, cli.seed, &desc, cli.json)?;
    match &cli.command {
        Command::Beta { p, k } => cmd_beta(&ctx, *p, k),
        Command::Omega { p, k, m } => cmd_omega(&ctx, *p, *k, *m),
        Command::Assemble { field, samples, r_lo, r_hi } => {
            cmd_assemble(&ctx, field, *samples, *r_lo, *r_hi)
        }
        Command::Residual { field, p, samples, step, r_lo, r_hi, min_plane_radius, threshold } => {
            cmd_residual(&ctx, field, *p, *samples, *step, *r_lo, *r_hi, *min_plane_radius, *threshold)
        }
        Command::Spherical { p, k, samples, step, threshold } => {
            cmd_spherical(&ctx, *p, *k, *samples, *step, *threshold)
        }
        Command::Limits { field, a, normal, directions, threshold } => {
            cmd_limits(&ctx, field, a, normal, *directions, *threshold)
        }
        Command::Reflectcheck { geometry, p, samples } => {
            cmd_reflectcheck(&ctx, geometry, *p, *samples)
        }
        Command::Solve { geometry, p, h, bc } => cmd_solve(&ctx, geometry, *p, *h, bc),
        Command::Fundamental { radius, a, epsilons, h } => {
            cmd_fundamental(&ctx, *radius, a, epsilons, *h)
        }
        Command::Render { field, mesh, solution, window, grid, name } => {
            cmd_render(&ctx, field.as_deref(), mesh.as_deref(), solution.as_deref(), window, *grid, name)
        }
    }
}

fn parse_k_spec(spec: &str) -> Result<(u32, u32), CliError> {
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: u32 = lo.trim().parse().map_err(|_| CliError::validation("bad k range"))?;
        let hi: u32 = hi.trim().parse().map_err(|_| CliError::validation("bad k range"))?;
        if lo < 1 || hi < lo {
            return Err(CliError::validation(format!("invalid mode range {spec}")));
        }
        Ok((lo, hi))
    } else {
        let k: u32 = spec.trim().parse().map_err(|_| CliError::validation("bad k value"))?;
        if k < 1 {
            return Err(CliError::validation("mode k must be >= 1"));
        }
        Ok((k, k))
    }
}

fn cmd_beta(ctx: &RunContext, p: f64, k_spec: &str) -> Result<(), CliError> {
    let (k_lo, k_hi) = parse_k_spec(k_spec)?;
    let mut rows_csv = Vec::new();
    let mut rows_json = Vec::new();
    for k in k_lo..=k_hi {
        let closed = beta_closed_form(p, k)?;
        let shot = beta_by_shooting(p, k)?;
        let diff = (closed - shot).abs();
        let residual = quadratic_residual(p, k, closed);
        rows_csv.push(vec![
            k.to_string(),
            fmt_float(closed),
            fmt_float(shot),
            fmt_float(diff),
            fmt_float(residual),
        ]);
        rows_json.push(json!({
            "k": k,
            "beta_closed": closed,
            "beta_shooting": shot,
            "diff": diff,
            "quadratic_residual": residual,
        }));
    }
    ctx.write_csv(
        "beta.csv",
        &["k", "beta_closed", "beta_shooting", "diff", "quadratic_residual"],
        &rows_csv,
    )?;
    ctx.write_json("beta.json", &json!({ "p": p, "rows": rows_json }))?;
    Ok(())
}

fn cmd_omega(ctx: &RunContext, p: f64, k: u32, m: usize) -> Result<(), CliError> {
    let pair = tabulate(p, k, m)?;
    let measured_zero = first_zero(p, pair.beta)?;
    let shooting_diff = (beta_by_shooting(p, k)? - pair.beta).abs();
    let rows: Vec<Vec<String>> = (0..pair.profile.grid.len())
        .map(|i| {
            vec![
                fmt_float(pair.profile.grid[i]),
                fmt_float(pair.profile.omega[i]),
                fmt_float(pair.profile.omega_prime[i]),
            ]
        })
        .collect();
    ctx.write_csv("omega.csv", &["theta", "omega", "omega_prime"], &rows)?;
    ctx.write_json(
        "omega.json",
        &json!({
            "p": p,
            "k": k,
            "m": m,
            "beta": pair.beta,
            "lambda2": pair.lambda2,
            "antiperiod": pair.profile.antiperiod,
            "first_zero": measured_zero,
            "residuals": {
                "quadratic": pair.beta_residual(),
                "omega_at_antiperiod": pair.antiperiod_residual(),
                "shooting_diff": shooting_diff,
            },
        }),
    )?;
    Ok(())
}

fn parse_field(spec: &str) -> Result<(FieldDescriptor, FieldRef), CliError> {
    let text = read_inline_or_file(spec)?;
    let desc: FieldDescriptor = serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("bad field descriptor: {e}")))?;
    let field = build_field(&desc)?;
    Ok((desc, field))
}

fn cmd_assemble(
    ctx: &RunContext,
    field_spec: &str,
    samples: usize,
    r_lo: f64,
    r_hi: f64,
) -> Result<(), CliError> {
    if !(r_hi > r_lo && r_lo >= 0.0) {
        return Err(CliError::validation("need 0 <= r_lo < r_hi"));
    }
    let (desc, field) = parse_field(field_spec)?;
    let n = field.dim();
    let singulars = field.singular_points();
    let mut sampler = Sampler::new(ctx.seed);
    let mut rows = Vec::new();
    let mut tries = 0usize;
    while rows.len() < samples {
        tries += 1;
        if tries > 1000 * samples.max(10) {
            return Err(CliError::verification("sampling region keeps hitting singular points"));
        }
        let x = sampler.in_annulus(&vec![0.0; n], r_lo, r_hi);
        if singulars.iter().any(|q| linalg::dist(&x, q) < 1e-2) {
            continue;
        }
        let (value, grad) = match (field.value(&x), field.gradient(&x)) {
            (Ok(v), Ok(g)) => (v, g),
            _ => continue,
        };
        let mut row: Vec<String> = x.iter().map(|&c| fmt_float(c)).collect();
        row.push(fmt_float(value));
        row.extend(grad.iter().map(|&c| fmt_float(c)));
        rows.push(row);
    }
    let mut columns: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    columns.push("value".into());
    columns.extend((1..=n).map(|i| format!("grad{i}")));
    let cols: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();
    ctx.write_csv("samples.csv", &cols, &rows)?;
    ctx.write_json(
        "field.json",
        &json!({ "descriptor": desc, "dim": n, "description": field.description() }),
    )?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_residual(
    ctx: &RunContext,
    field_spec: &str,
    p: f64,
    samples: usize,
    step: f64,
    r_lo: f64,
    r_hi: f64,
    min_plane_radius: f64,
    threshold: f64,
) -> Result<(), CliError> {
    if !(p > 1.0) || !(step > 0.0) || !(threshold > 0.0) {
        return Err(CliError::validation("need p > 1, step > 0, threshold > 0"));
    }
    let (desc, field) = parse_field(field_spec)?;
    let n = field.dim();
    let singulars = field.singular_points();
    let mut sampler = Sampler::new(ctx.seed);
    let mut reports = Vec::new();
    let mut tries = 0usize;
    while reports.len() < samples {
        tries += 1;
        if tries > 2000 * samples.max(10) {
            return Err(CliError::verification(
                "could not draw enough admissible samples for the residual sweep",
            ));
        }
        let x = sampler.in_annulus(&vec![0.0; n], r_lo, r_hi);
        if singulars.iter().any(|q| linalg::dist(&x, q) < 12.0 * step.max(1e-2)) {
            continue;
        }
        if n >= 2 && (x[0] * x[0] + x[1] * x[1]).sqrt() < min_plane_radius {
            continue;
        }
        match field.gradient(&x) {
            Ok(g) if linalg::norm(&g) >= 1e-6 => {}
            _ => continue,
        }
        reports.push(plaplace_residual(field.as_ref(), p, &x, step)?);
    }
    let worst =
        reports.iter().map(|r| r.normalized.abs()).fold(0.0_f64, f64::max);
    let pass = worst <= threshold;
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let mut row: Vec<String> = r.point.iter().map(|&c| fmt_float(c)).collect();
            row.push(fmt_float(r.h));
            row.push(fmt_float(r.residual));
            row.push(fmt_float(r.gradient_norm));
            row.push(fmt_float(r.normalized));
            row
        })
        .collect();
    let mut columns: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    columns.extend(["h".into(), "residual".into(), "gradient_norm".into(), "normalized".into()]);
    let cols: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();
    ctx.write_csv("residual.csv", &cols, &rows)?;
    ctx.write_json(
        "residual.json",
        &json!({
            "descriptor": desc,
            "p": p,
            "h": step,
            "threshold": threshold,
            "samples": reports.len(),
            "worst_normalized": worst,
            "pass": pass,
            "reports": reports,
        }),
    )?;
    if !pass {
        return Err(CliError::verification(format!(
            "residual sweep failed: worst normalized residual {worst:.3e} > {threshold:.1e}"
        )));
    }
    Ok(())
}

fn cmd_spherical(
    ctx: &RunContext,
    p: f64,
    k: u32,
    samples: usize,
    step: f64,
    threshold: f64,
) -> Result<(), CliError> {
    let pair = tabulate(p, k, 4096)?;
    let mut sampler = Sampler::new(ctx.seed);
    let mut rows_json = Vec::new();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let phi = sampler.uniform(0.25, PI - 0.25);
        let theta = sampler.uniform(0.0, 2.0 * PI);
        let r = spherical_residual_3d(&pair, pair.beta, phi, theta, step)?;
        worst = worst.max(r.abs());
        rows_json.push(json!({ "phi": phi, "theta": theta, "residual": r }));
    }
    let pass = worst <= threshold;
    ctx.write_json(
        "spherical.json",
        &json!({
            "p": p,
            "k": k,
            "beta": pair.beta,
            "h": step,
            "threshold": threshold,
            "max_abs_residual": worst,
            "pass": pass,
            "rows": rows_json,
        }),
    )?;
    if !pass {
        return Err(CliError::verification(format!(
            "spherical residual {worst:.3e} exceeds {threshold:.1e}"
        )));
    }
    Ok(())
}

fn cmd_limits(
    ctx: &RunContext,
    field_spec: &str,
    a_spec: &str,
    normal_spec: &str,
    directions: usize,
    threshold: f64,
) -> Result<(), CliError> {
    let (desc, field) = parse_field(field_spec)?;
    let a = parse_vec(a_spec)?;
    let normal = parse_vec(normal_spec)?;
    if a.len() != field.dim() || normal.len() != field.dim() {
        return Err(CliError::validation("a/normal dimension does not match the field"));
    }
    if directions < 1 {
        return Err(CliError::validation("need at least one direction"));
    }
    let dirs: Vec<Vec<f64>> = if field.dim() == 2 {
        let tangent = vec![-normal[1], normal[0]];
        (0..directions)
            .map(|i| {
                let phi = PI / 2.0 + PI * (i as f64 + 0.5) / directions as f64;
                let c = phi.cos();
                let s = phi.sin();
                vec![normal[0] * c + tangent[0] * s, normal[1] * c + tangent[1] * s]
            })
            .collect()
    } else {
        let mut sampler = Sampler::new(ctx.seed);
        let mut out = Vec::new();
        while out.len() < directions {
            let v = sampler.unit_vector(field.dim());
            if linalg::dot(&v, &normal) < -0.05 {
                out.push(v);
            }
        }
        out
    };
    let est = boundary_limit(field.as_ref(), &a, &normal, &dirs, &[0.02, 0.01])?;
    let worst =
        est.iter().map(|e| (e.estimate - e.expected).abs()).fold(0.0_f64, f64::max);
    let pass = worst <= threshold;
    ctx.write_json(
        "limits.json",
        &json!({
            "descriptor": desc,
            "a": a,
            "normal": normal,
            "threshold": threshold,
            "max_error": worst,
            "pass": pass,
            "rows": est,
        }),
    )?;
    if !pass {
        return Err(CliError::verification(format!(
            "boundary limit error {worst:.3e} exceeds {threshold:.1e}"
        )));
    }
    Ok(())
}

fn parse_geometry(spec: &str) -> Result<DomainGeometry, CliError> {
    let text = read_inline_or_file(spec)?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("bad geometry descriptor: {e}")))
}

fn cmd_reflectcheck(
    ctx: &RunContext,
    geometry_spec: &str,
    p: f64,
    samples: usize,
) -> Result<(), CliError> {
    if !(p > 1.0) {
        return Err(CliError::validation(format!("p must be > 1, got {p}")));
    }
    let g = parse_geometry(geometry_spec)?;
    let beta0 = g.tubular_radius();
    if !(beta0 > 0.0) {
        return Err(CliError::validation("geometry does not support reflection"));
    }
    let mut sampler = Sampler::new(ctx.seed);
    let band = beta0.min(1.0);

    let draw_tube_point = |sampler: &mut Sampler, lo: f64, hi: f64| -> Option<Vec<f64>> {
        for _ in 0..10_000 {
            let x = match &g {
                DomainGeometry::HalfPlane => {
                    vec![sampler.uniform(-2.0, 2.0), sampler.uniform(lo, hi)]
                }
                _ => sampler.in_box(2, -3.0, 3.0),
            };
            match g.signed_distance(&x) {
                Ok(rho) if rho.abs() >= lo && rho.abs() <= hi => {
                    if matches!(g, DomainGeometry::HalfPlane) || g.reflect(&x).is_ok() {
                        return Some(x);
                    }
                }
                _ => {}
            }
        }
        None
    };

    // involution + projection identity
    let mut max_involution: f64 = 0.0;
    let mut max_projection: f64 = 0.0;
    for _ in 0..samples {
        let Some(x) = draw_tube_point(&mut sampler, 0.0, 0.8 * band) else {
            return Err(CliError::verification("cannot sample the tubular neighborhood"));
        };
        let r1 = g.reflect(&x)?;
        let r2 = g.reflect(&r1.image)?;
        max_involution = max_involution.max(linalg::dist(&r2.image, &x));
        max_projection = max_projection
            .max((linalg::dist(&x, &r1.projection) - r1.signed_distance.abs()).abs());
    }

    // eikonal property of the signed distance
    let mut max_eikonal: f64 = 0.0;
    let fd = 1e-6;
    for _ in 0..samples {
        let Some(x) = draw_tube_point(&mut sampler, 0.05 * band, 0.8 * band) else {
            break;
        };
        let mut grad = [0.0, 0.0];
        let mut ok = true;
        for j in 0..2 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += fd;
            xm[j] -= fd;
            match (g.signed_distance(&xp), g.signed_distance(&xm)) {
                (Ok(a), Ok(b)) => grad[j] = (a - b) / (2.0 * fd),
                _ => ok = false,
            }
        }
        if ok {
            let gn = (grad[0] * grad[0] + grad[1] * grad[1]).sqrt();
            if (gn - 1.0).abs() < 0.5 {
                max_eikonal = max_eikonal.max((gn - 1.0).abs());
            }
        }
    }

    // boundary fixing: psi(x) = x, Dpsi = tangent-plane reflection
    let mut max_fix: f64 = 0.0;
    let mut max_jac_dev: f64 = 0.0;
    let mut boundary_a_dev: f64 = 0.0;
    let etas: Vec<Vec<f64>> =
        (0..8).map(|_| sampler.in_annulus(&[0.0, 0.0], 0.3, 2.0)).collect();
    for _ in 0..24 {
        let Some(x) = draw_tube_point(&mut sampler, 0.0, 0.8 * band) else { break };
        let xi = g.project_to_boundary(&x)?;
        let r = g.reflect(&xi)?;
        max_fix = max_fix.max(linalg::dist(&r.image, &xi));
        let nu = g.outward_normal(&xi)?;
        max_jac_dev = max_jac_dev.max(r.jacobian.max_diff(&SquareMat::reflection(&nu)));
        let cf = transformed_coefficients(&g, p, &xi)?;
        for eta in &etas {
            let val = cf.eval(eta);
            let en = linalg::norm(eta);
            let expected = linalg::scale(eta, en.powf(p - 2.0));
            boundary_a_dev = boundary_a_dev.max(linalg::dist(&val, &expected));
        }
    }

    // transformed coefficients on the outer half-tube
    let mut zero_exact = true;
    let mut outer = Vec::new();
    while outer.len() < samples / 2 {
        let Some(x) = draw_tube_point(&mut sampler, 1e-4, 0.5 * band) else { break };
        if g.signed_distance(&x)? > 0.0 {
            let cf = transformed_coefficients(&g, p, &x)?;
            if cf.eval(&[0.0, 0.0]) != vec![0.0, 0.0] {
                zero_exact = false;
            }
            outer.push(x);
        }
    }
    let xis: Vec<Vec<f64>> = (0..8).map(|_| sampler.unit_vector(2)).collect();
    let gamma = ellipticity_sample(&g, p, &outer, &etas, &xis)?;

    let pass = max_involution <= 1e-10
        && max_projection <= 1e-12
        && max_eikonal <= 1e-6
        && max_fix <= 1e-12
        && max_jac_dev <= 1e-6
        && boundary_a_dev <= 1e-10
        && zero_exact
        && !gamma.violated;
    ctx.write_json(
        "reflectcheck.json",
        &json!({
            "geometry": g,
            "p": p,
            "samples": samples,
            "max_involution_error": max_involution,
            "max_projection_identity_error": max_projection,
            "max_eikonal_error": max_eikonal,
            "max_boundary_fix_error": max_fix,
            "max_boundary_jacobian_vs_tangent_reflection": max_jac_dev,
            "max_boundary_coefficient_error": boundary_a_dev,
            "coefficients_vanish_at_zero": zero_exact,
            "ellipticity": gamma,
            "pass": pass,
        }),
    )?;
    if !pass {
        return Err(CliError::verification("reflection checks failed; see reflectcheck.json"));
    }
    Ok(())
}

fn boundary_fn(
    bc: &str,
    geometry: &DomainGeometry,
) -> Result<Box<dyn Fn(BoundaryTag, &[f64; 2]) -> f64>, CliError> {
    if bc == "zero" {
        return Ok(Box::new(|_, _| 0.0));
    }
    if bc == "affine-x2" {
        return Ok(Box::new(|_, x| x[1]));
    }
    if let Some(c) = bc.strip_prefix("constant:") {
        let c: f64 =
            c.parse().map_err(|_| CliError::validation(format!("bad constant in bc '{bc}'")))?;
        return Ok(Box::new(move |_, _| c));
    }
    if let Some(rest) = bc.strip_prefix("separable:") {
        let (p_str, k_str) = rest
            .split_once(':')
            .ok_or_else(|| CliError::validation("bc separable:<p>:<k>"))?;
        let p: f64 =
            p_str.parse().map_err(|_| CliError::validation("bad p in separable bc"))?;
        let k: u32 =
            k_str.parse().map_err(|_| CliError::validation("bad k in separable bc"))?;
        let pair = Arc::new(tabulate(p, k, 1024)?);
        let field = pharmonic::fields::separable_2d(pair);
        return Ok(Box::new(move |tag, x| match tag {
            // arc data, zero on straight edges; on a full circle boundary
            // the tag is Outer and the data applies everywhere
            BoundaryTag::Arc | BoundaryTag::Outer | BoundaryTag::InnerArc => {
                field.value(&[x[0], x[1]]).unwrap_or(0.0)
            }
            _ => 0.0,
        }));
    }
    if bc == "exterior-kernel" {
        let a = match geometry {
            DomainGeometry::PuncturedDisk { a, .. } => a.clone(),
            _ => {
                return Err(CliError::validation(
                    "exterior-kernel data needs a punctured-disk geometry",
                ))
            }
        };
        return Ok(Box::new(move |tag, x| match tag {
            BoundaryTag::InnerArc => {
                let na = {
                    let n = linalg::norm(&a);
                    [a[0] / n, a[1] / n]
                };
                let we = [a[0] + na[0], a[1] + na[1]];
                let dx = [x[0] - we[0], x[1] - we[1]];
                let da = [x[0] - a[0], x[1] - a[1]];
                (dx[0] * dx[0] + dx[1] * dx[1] - 1.0) / (2.0 * (da[0] * da[0] + da[1] * da[1]))
            }
            _ => 0.0,
        }));
    }
    Err(CliError::validation(format!("unknown boundary data '{bc}'")))
}

fn mesh_for(geometry: &DomainGeometry, h: f64) -> Result<Mesh2D, CliError> {
    Ok(match geometry {
        DomainGeometry::UnitDisk => mesh_disk(1.0, &[1.0, 0.0], None, h)?,
        DomainGeometry::Disk { center, radius } => {
            if center.iter().any(|&c| c != 0.0) {
                return Err(CliError::validation("meshing expects a disk centered at the origin"));
            }
            mesh_disk(*radius, &[*radius, 0.0], None, h)?
        }
        DomainGeometry::Sector { angle } => mesh_sector(*angle, h)?,
        DomainGeometry::PuncturedDisk { a, epsilon } => mesh_disk(1.0, a, Some(*epsilon), h)?,
        _ => return Err(CliError::validation("geometry kind is not meshable")),
    })
}

fn write_solution_artifacts(
    ctx: &RunContext,
    prefix: &str,
    mesh: &Mesh2D,
    sol: &pharmonic::solver::DiscreteSolution,
) -> Result<(), CliError> {
    ctx.write_json(&format!("{prefix}mesh.json"), mesh)?;
    let rows: Vec<Vec<String>> = mesh
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| {
            vec![i.to_string(), fmt_float(v[0]), fmt_float(v[1]), fmt_float(sol.values[i])]
        })
        .collect();
    ctx.write_csv(&format!("{prefix}solution.csv"), &["node", "x", "y", "value"], &rows)?;
    let log_rows: Vec<serde_json::Value> = sol
        .log
        .iter()
        .map(|r| {
            json!({
                "iter": r.iter,
                "energy": r.energy,
                "grad_norm": r.grad_norm,
                "delta": r.delta,
                "gradient_fallback": r.gradient_fallback,
            })
        })
        .collect();
    ctx.write_json(&format!("{prefix}log.json"), &log_rows)?;
    Ok(())
}

fn cmd_solve(ctx: &RunContext, geometry_spec: &str, p: f64, h: f64, bc: &str) -> Result<(), CliError> {
    if !(p > 1.0) {
        return Err(CliError::validation(format!("p must be > 1, got {p}")));
    }
    let g = parse_geometry(geometry_spec)?;
    let mesh = mesh_for(&g, h)?;
    let data = boundary_fn(bc, &g)?;
    let prob = DirichletProblem::from_fn(mesh.clone(), p, |tag, x| data(tag, x))?;
    let sol = solve_dirichlet(&prob, &SolverOptions::default())?;
    write_solution_artifacts(ctx, "", &mesh, &sol)?;
    ctx.write_json(
        "solve.json",
        &json!({
            "geometry": g,
            "p": p,
            "h": h,
            "bc": bc,
            "nodes": mesh.node_count(),
            "triangles": mesh.tri_count(),
            "energy": sol.energy,
            "iterations": sol.iterations,
            "residual_norm": sol.residual_norm,
            "gradient_fallbacks": sol.gradient_fallbacks,
        }),
    )?;
    Ok(())
}

fn cmd_fundamental(
    ctx: &RunContext,
    radius: f64,
    a_spec: &str,
    epsilons: &[f64],
    h: f64,
) -> Result<(), CliError> {
    let a = parse_vec(a_spec)?;
    let opts = FundamentalOptions {
        epsilons: epsilons.to_vec(),
        h,
        solver: SolverOptions::default(),
        monotonicity_tol: 1e-8,
    };
    let run = fundamental_solution(radius, &a, &opts)?;
    for (i, es) in run.solves.iter().enumerate() {
        write_solution_artifacts(ctx, &format!("eps{i}_"), &es.mesh, &es.solution)?;
    }
    let pts = comparison_points(radius, &run.a, 0.3 * radius, 0.05 * radius);
    let cmp = run.kernel_comparison(&pts)?;
    ctx.write_json(
        "fundamental.json",
        &json!({
            "radius": radius,
            "a": run.a,
            "h": h,
            "epsilons": epsilons,
            "monotonicity": run.monotonicity,
            "kernel_comparison": cmp,
        }),
    )?;
    if run.monotonicity.violated {
        return Err(CliError::verification(
            "epsilon-monotonicity violated beyond tolerance; see fundamental.json",
        ));
    }
    Ok(())
}

fn cmd_render(
    ctx: &RunContext,
    field_spec: Option<&str>,
    mesh_path: Option<&std::path::Path>,
    solution_path: Option<&std::path::Path>,
    window: &str,
    grid: usize,
    name: &str,
) -> Result<(), CliError> {
    let metadata = format!(
        "pharmonic v{} config={} seed={}",
        pharmonic::VERSION,
        ctx.hash,
        ctx.seed
    );
    let svg = if let Some(spec) = field_spec {
        let (_, field) = parse_field(spec)?;
        if field.dim() != 2 {
            return Err(CliError::validation(format!(
                "render needs a 2D input, field has dimension {}",
                field.dim()
            )));
        }
        let w = parse_vec(window)?;
        if w.len() != 4 || !(w[2] > w[0]) || !(w[3] > w[1]) {
            return Err(CliError::validation("window must be x0,y0,x1,y1 with x1>x0, y1>y0"));
        }
        if !(2..=2048).contains(&grid) {
            return Err(CliError::validation("grid must be in 2..=2048"));
        }
        let mut vertices = Vec::with_capacity((grid + 1) * (grid + 1));
        let mut values = Vec::with_capacity(vertices.capacity());
        for j in 0..=grid {
            for i in 0..=grid {
                let x = w[0] + (w[2] - w[0]) * i as f64 / grid as f64;
                let y = w[1] + (w[3] - w[1]) * j as f64 / grid as f64;
                vertices.push([x, y]);
                // nudge off singular points so the grid never evaluates one
                let v = field
                    .value(&[x, y])
                    .or_else(|_| field.value(&[x + 1e-9, y + 1e-9]))
                    .map_err(CliError::from)?;
                values.push(v);
            }
        }
        let mut triangles = Vec::with_capacity(2 * grid * grid);
        let idx = |i: usize, j: usize| j * (grid + 1) + i;
        for j in 0..grid {
            for i in 0..grid {
                triangles.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                triangles.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
        crate::svg::render_contours(&vertices, &triangles, &values, &metadata)
    } else {
        let mesh_path = mesh_path.ok_or_else(|| {
            CliError::validation("render needs either --field or --mesh with --solution")
        })?;
        let solution_path = solution_path.unwrap();
        let mesh: Mesh2D = {
            let text = std::fs::read_to_string(mesh_path)?;
            // accept both raw meshes and config-stamped wrappers
            match serde_json::from_str::<Mesh2D>(&text) {
                Ok(m) => m,
                Err(_) => {
                    let v: serde_json::Value = serde_json::from_str(&text)?;
                    serde_json::from_value(v["data"].clone())
                        .map_err(|e| CliError::validation(format!("bad mesh file: {e}")))?
                }
            }
        };
        let values = read_solution_csv(solution_path, mesh.vertices.len())?;
        crate::svg::render_contours(&mesh.vertices, &mesh.triangles, &values, &metadata)
    };
    ctx.write_text(name, &svg)?;
    Ok(())
}

fn read_solution_csv(path: &std::path::Path, n: usize) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut values = vec![f64::NAN; n];
    for line in text.lines() {
        if line.starts_with('#') || line.starts_with("node") || line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            return Err(CliError::validation(format!("bad solution row '{line}'")));
        }
        let node: usize =
            parts[0].parse().map_err(|_| CliError::validation("bad node index"))?;
        let value: f64 =
            parts[3].parse().map_err(|_| CliError::validation("bad node value"))?;
        if node >= n {
            return Err(CliError::validation(format!("node {node} out of range")));
        }
        values[node] = value;
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(CliError::validation("solution file does not cover every node"));
    }
    Ok(values)
}
