//! One function per subcommand. Each loads through the PGM codec, runs the
//! library call, and prints its report with 17-significant-digit floats.

use std::path::Path;

use anyhow::{bail, Context};
use thermolet_core::contourlet::{
    contourlet_decompose, contourlet_reconstruct, read_coefficients, write_coefficients,
};
use thermolet_core::metrics::MetricReport;
use thermolet_core::pgm::{load_pgm, save_pgm};
use thermolet_core::resample::bicubic_resize;
use thermolet_core::sig17;
use thermolet_core::spectral::{radial_spectrum, spectral_fidelity_loss};

pub fn decompose(input: &Path, output: &Path, levels: usize, dirs: &[usize]) -> anyhow::Result<()> {
    if dirs.len() != levels {
        bail!("--dirs needs exactly {levels} entries, got {}", dirs.len());
    }
    let img = load_pgm(input)?;
    let coeffs = contourlet_decompose(&img, dirs)?;
    write_coefficients(output, &coeffs)?;
    println!(
        "levels {} subbands {} coefficients {}",
        coeffs.levels(),
        coeffs.subband_count(),
        coeffs.total_coefficients()
    );
    println!(
        "base {}x{} energy {}",
        coeffs.base.height(),
        coeffs.base.width(),
        sig17(coeffs.base.energy())
    );
    for (j, level) in coeffs.directional.iter().enumerate() {
        let energy: f64 = level.bands.iter().map(|b| b.energy()).sum();
        println!(
            "level {j} {}x{} directions {} energy {}",
            level.bands[0].height(),
            level.bands[0].width(),
            level.band_count(),
            sig17(energy)
        );
    }
    Ok(())
}

pub fn reconstruct(
    input: &Path,
    output: &Path,
    reference: Option<&Path>,
    peak: f64,
) -> anyhow::Result<()> {
    let coeffs = read_coefficients(input)?;
    let img = contourlet_reconstruct(&coeffs)?;
    save_pgm(&img, output)?;
    if let Some(ref_path) = reference {
        let reference = load_pgm(ref_path)?;
        let written = load_pgm(output)?;
        let psnr = thermolet_core::metrics::psnr(&reference, &written, peak)?;
        if psnr.is_infinite() {
            println!("psnr inf");
        } else {
            println!("psnr {}", sig17(psnr));
        }
    }
    Ok(())
}

pub fn degrade(input: &Path, output: &Path, scale: usize) -> anyhow::Result<()> {
    if scale != 2 && scale != 4 {
        bail!("--scale must be 2 or 4, got {scale}");
    }
    let img = load_pgm(input)?;
    let small = bicubic_resize(&img, 1.0 / scale as f64)?;
    save_pgm(&small, output)?;
    Ok(())
}

pub fn metrics(reference: &Path, test: &Path, peak: f64) -> anyhow::Result<()> {
    let a = load_pgm(reference)?;
    let b = load_pgm(test)?;
    let report = MetricReport::compute(&a, &b, peak)?;
    println!("{}", report.to_json());
    Ok(())
}

pub fn spectrum(reference: &Path, test: &Path, output: &Path, bins: usize) -> anyhow::Result<()> {
    let a = load_pgm(reference)?;
    let b = load_pgm(test)?;
    let loss = spectral_fidelity_loss(&a, &b)?;
    let ha = radial_spectrum(&a, bins)?;
    let hb = radial_spectrum(&b, bins)?;

    // equal dims were checked by the loss, so the grids and counts agree
    let mut csv = String::from("radius_lo,radius_hi,count,ref_mean_log_mag,test_mean_log_mag\n");
    for i in 0..ha.nbins() {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            sig17(ha.bin_edges[i]),
            sig17(ha.bin_edges[i + 1]),
            ha.counts[i],
            sig17(ha.mean_log_mag[i]),
            sig17(hb.mean_log_mag[i]),
        ));
    }
    std::fs::write(output, csv).with_context(|| format!("writing {}", output.display()))?;
    println!("spectral_fidelity_loss {}", sig17(loss));
    Ok(())
}
