//! Writes the per-degree operator constants table consumed by `nullmem`.
//!
//! Usage: `gen-constants [OUTPUT] [LMAX]` (defaults: stdout, 64).

use std::io::Write;

use nullmem_oracle::{kernel_eigenvalue, stt_divergence_constant, Parity};

fn main() -> std::io::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args.next();
    let lmax: usize = args.next().map(|s| s.parse().expect("LMAX must be an integer")).unwrap_or(64);

    let mut text = String::new();
    text.push_str("# nullmem operator constants\n");
    text.push_str("# generated by nullmem-oracle gen-constants: weak-form dense quadrature of\n");
    text.push_str("# finite-differenced harmonics (lambda_e, lambda_b, zonal m = 0) and\n");
    text.push_str("# Gauss quadrature of the kernel against P_l (mu).\n");
    text.push_str("# columns: l lambda_e lambda_b mu\n");
    text.push_str("format_version = 1\n");
    for l in 0..=lmax {
        let (le, lb) = if l >= 2 {
            (
                stt_divergence_constant(l, 0, Parity::Electric),
                stt_divergence_constant(l, 0, Parity::Magnetic),
            )
        } else {
            (0.0, 0.0)
        };
        let mu = kernel_eigenvalue(l);
        text.push_str(&format!("{l} {le:.16e} {lb:.16e} {mu:.16e}\n"));
    }

    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}
