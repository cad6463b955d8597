//! Trajectory CSV: `t,residual,energy,K_1,...,K_N`, 17 significant digits.

use std::io::{self, BufRead, Write};

use crate::solver::Trajectory;
use crate::KVector;

pub fn write_trajectory_csv<W: Write>(mut out: W, trajectory: &Trajectory) -> io::Result<()> {
    let n = trajectory.states.first().map_or(0, |k| k.len());
    let mut header = String::from("t,residual,energy");
    for i in 1..=n {
        header.push_str(&format!(",K_{i}"));
    }
    writeln!(out, "{header}")?;
    for i in 0..trajectory.len() {
        write!(
            out,
            "{:.16e},{:.16e},{:.16e}",
            trajectory.times[i], trajectory.residuals[i], trajectory.energies[i]
        )?;
        for k in trajectory.states[i].as_slice() {
            write!(out, ",{k:.16e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn read_trajectory_csv<R: BufRead>(input: R) -> io::Result<Trajectory> {
    let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| bad("empty trajectory file".into()))??;
    let columns = header.split(',').count();
    if columns < 3 || !header.starts_with("t,residual,energy") {
        return Err(bad(format!("unexpected header `{header}`")));
    }
    let mut traj = Trajectory::default();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let values: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(format!("row {}: {e}", i + 2)))?;
        if values.len() != columns {
            return Err(bad(format!("row {}: expected {columns} columns", i + 2)));
        }
        traj.times.push(values[0]);
        traj.residuals.push(values[1]);
        traj.energies.push(values[2]);
        let k = KVector::new(values[3..].to_vec()).map_err(|e| bad(e.to_string()))?;
        traj.states.push(k);
    }
    Ok(traj)
}
