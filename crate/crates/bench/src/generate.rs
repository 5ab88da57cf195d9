use anyhow::{anyhow, Context};
use flexopt::instances::{generate_nesterov_lasso, profile_params, save_instance, GeneratorParams};

use crate::args::GenerateArgs;
use crate::runner::prepare_out_dir;
use crate::{CliResult, Failure, EXIT_OK};

pub fn params(a: &GenerateArgs) -> Result<GeneratorParams, Failure> {
    let mut p = match &a.profile {
        Some(name) => profile_params(name, a.seed).map_err(Failure::usage)?,
        None => {
            let (Some(m), Some(n), Some(density)) = (a.m, a.n, a.density) else {
                return Err(Failure::usage(anyhow!("give --profile or all of --m, --n, --density")));
            };
            GeneratorParams::new(m, n, density, 1.0, a.seed)
        }
    };
    p.m = a.m.unwrap_or(p.m);
    p.n = a.n.unwrap_or(p.n);
    p.density = a.density.unwrap_or(p.density);
    p.c = a.c;
    p.scale = a.scale;
    p.validate().map_err(Failure::usage)?;
    Ok(p)
}

pub fn run(a: &GenerateArgs) -> CliResult {
    let p = params(a)?;
    prepare_out_dir(&a.out, a.force)?;
    let inst = generate_nesterov_lasso(&p).map_err(Failure::other)?;
    save_instance(&inst, &a.out)
        .with_context(|| format!("writing instance to {}", a.out.display()))
        .map_err(Failure::other)?;
    let kkt = inst.kkt_residual().unwrap_or(f64::NAN);
    println!(
        "wrote {}x{} instance to {} (support {}, v_star {:.16e})",
        p.m,
        p.n,
        a.out.display(),
        p.support_size(),
        inst.v_star.unwrap_or(f64::NAN)
    );
    println!("kkt_residual {kkt:.3e}");
    Ok(EXIT_OK)
}
