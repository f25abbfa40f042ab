//! Extended-XYZ trajectory reader and writer.
//!
//! Per frame: line 1 is the atom count, line 2 holds `key=value` properties
//! including `Lattice` (9 numbers, row-major cell vectors), `Time`, `pbc`
//! and a `Properties` descriptor; one whitespace-separated atom per
//! subsequent line. The writer emits
//! `Properties=species:S:1:pos:R:3:vel:R:3:mass:R:1` and 17 significant
//! digits so that a read/write cycle reproduces the text exactly.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::system::{ParticleState, SimulationCell, Snapshot, Trajectory};
use crate::Vec3;

/// Reads an extended-XYZ trajectory from a string.
pub fn parse_trajectory(content: &str, path_label: &str) -> Result<Trajectory> {
    let mut lines = content.lines().peekable();
    let mut snapshots = Vec::new();
    let mut velocities_present = true;
    let mut frame = 0usize;

    let err = |frame: usize, message: String| Error::TrajectoryParse {
        path: path_label.to_string(),
        frame,
        message,
    };

    while let Some(first) = lines.next() {
        let first = first.trim();
        if first.is_empty() {
            // Trailing blank lines are fine; blank lines between frames are not
            // part of the format but are tolerated at end of file.
            if lines.peek().is_none() {
                break;
            }
            return Err(err(frame, "blank line where atom count expected".into()));
        }
        let count: usize = first
            .parse()
            .map_err(|_| err(frame, format!("invalid atom count line {first:?}")))?;
        if count == 0 {
            return Err(err(frame, "frame declares zero atoms".into()));
        }
        let header = lines
            .next()
            .ok_or_else(|| err(frame, "missing comment/properties line".into()))?;
        let props = parse_key_values(header).map_err(|m| err(frame, m))?;

        let lattice = props
            .iter()
            .find(|(k, _)| k == "Lattice")
            .ok_or_else(|| err(frame, "missing Lattice entry".into()))?;
        let lat: Vec<f64> = lattice
            .1
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| err(frame, format!("bad Lattice value {:?}", lattice.1)))?;
        if lat.len() != 9 {
            return Err(err(frame, format!("Lattice needs 9 numbers, got {}", lat.len())));
        }
        // Orthogonal cells only: off-diagonal entries must vanish.
        for (i, v) in lat.iter().enumerate() {
            if i % 4 != 0 && *v != 0.0 {
                return Err(err(frame, "non-orthogonal Lattice not supported".into()));
            }
        }
        let periodic = match props.iter().find(|(k, _)| k == "pbc") {
            Some((_, v)) => {
                let flags: Vec<&str> = v.split_whitespace().collect();
                if flags.len() != 3 {
                    return Err(err(frame, format!("bad pbc value {v:?}")));
                }
                let mut p = [false; 3];
                for (k, f) in flags.iter().enumerate() {
                    p[k] = matches!(*f, "T" | "t" | "true" | "True" | "1");
                }
                p
            }
            None => [true; 3],
        };
        let cell = SimulationCell::new(Vec3::new(lat[0], lat[4], lat[8]), periodic)
            .map_err(|e| err(frame, e.to_string()))?;

        let time = match props.iter().find(|(k, _)| k == "Time") {
            Some((_, v)) => v
                .parse::<f64>()
                .map_err(|_| err(frame, format!("bad Time value {v:?}")))?,
            None => frame as f64,
        };

        let descriptor = props
            .iter()
            .find(|(k, _)| k == "Properties")
            .map(|(_, v)| v.as_str())
            .unwrap_or("species:S:1:pos:R:3");
        let columns = parse_property_descriptor(descriptor).map_err(|m| err(frame, m))?;
        let has_velocities = columns.iter().any(|c| c.name == "vel");
        if !has_velocities {
            velocities_present = false;
        }

        let mut species = Vec::with_capacity(count.min(1 << 16));
        let mut positions = Vec::with_capacity(count.min(1 << 16));
        let mut velocities = Vec::with_capacity(count.min(1 << 16));
        let mut masses = Vec::with_capacity(count.min(1 << 16));
        for row in 0..count {
            let line = lines.next().ok_or_else(|| {
                err(frame, format!("frame declares {count} atoms but ends after {row}"))
            })?;
            let mut tokens = line.split_whitespace();
            let mut sp = String::new();
            let mut pos = Vec3::zeros();
            let mut vel = Vec3::zeros();
            let mut mass = 1.0;
            for col in &columns {
                match col.name.as_str() {
                    "species" => {
                        sp = tokens
                            .next()
                            .ok_or_else(|| err(frame, format!("atom {row}: missing species")))?
                            .to_string();
                    }
                    "pos" | "vel" => {
                        let mut v = Vec3::zeros();
                        for c in 0..3 {
                            let t = tokens.next().ok_or_else(|| {
                                err(frame, format!("atom {row}: missing {} component", col.name))
                            })?;
                            v[c] = t.parse::<f64>().map_err(|_| {
                                err(frame, format!("atom {row}: bad {} value {t:?}", col.name))
                            })?;
                        }
                        if col.name == "pos" {
                            pos = v;
                        } else {
                            vel = v;
                        }
                    }
                    "mass" => {
                        let t = tokens
                            .next()
                            .ok_or_else(|| err(frame, format!("atom {row}: missing mass")))?;
                        mass = t
                            .parse::<f64>()
                            .map_err(|_| err(frame, format!("atom {row}: bad mass value {t:?}")))?;
                    }
                    other => {
                        // Skip unknown columns by their declared width.
                        for _ in 0..col.width {
                            tokens.next().ok_or_else(|| {
                                err(frame, format!("atom {row}: missing {other} column"))
                            })?;
                        }
                    }
                }
            }
            species.push(sp);
            positions.push(pos);
            velocities.push(vel);
            masses.push(mass);
        }
        let state = ParticleState::new(positions, velocities, masses, species, cell)
            .map_err(|e| err(frame, e.to_string()))?;
        snapshots.push(Snapshot { time, state });
        frame += 1;
    }
    if snapshots.is_empty() {
        return Err(err(0, "no frames found".into()));
    }
    Trajectory::with_flags(snapshots, velocities_present).map_err(|e| Error::TrajectoryParse {
        path: path_label.to_string(),
        frame: 0,
        message: e.to_string(),
    })
}

pub fn read_trajectory(path: impl AsRef<Path>) -> Result<Trajectory> {
    let path = path.as_ref();
    let content = std::fs::read_to_string(path)?;
    parse_trajectory(&content, &path.display().to_string())
}

/// Serializes a trajectory to extended-XYZ text.
pub fn format_trajectory(traj: &Trajectory) -> String {
    let mut out = String::new();
    for snap in traj.snapshots() {
        let state = &snap.state;
        let l = state.cell().lengths();
        let p = state.cell().periodic();
        let _ = writeln!(out, "{}", state.len());
        let _ = writeln!(
            out,
            "Lattice=\"{} 0 0 0 {} 0 0 0 {}\" Properties=species:S:1:pos:R:3:vel:R:3:mass:R:1 Time={} pbc=\"{} {} {}\"",
            fmt_f64(l.x),
            fmt_f64(l.y),
            fmt_f64(l.z),
            fmt_f64(snap.time),
            tf(p[0]),
            tf(p[1]),
            tf(p[2])
        );
        for i in 0..state.len() {
            let x = state.positions()[i];
            let v = state.velocities()[i];
            let _ = writeln!(
                out,
                "{} {} {} {} {} {} {} {}",
                state.species()[i],
                fmt_f64(x.x),
                fmt_f64(x.y),
                fmt_f64(x.z),
                fmt_f64(v.x),
                fmt_f64(v.y),
                fmt_f64(v.z),
                fmt_f64(state.masses()[i])
            );
        }
    }
    out
}

pub fn write_trajectory(path: impl AsRef<Path>, traj: &Trajectory) -> Result<()> {
    std::fs::write(path, format_trajectory(traj))?;
    Ok(())
}

fn tf(b: bool) -> &'static str {
    if b {
        "T"
    } else {
        "F"
    }
}

/// 17 significant digits: enough for an exact f64 round trip.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

struct Column {
    name: String,
    width: usize,
}

fn parse_property_descriptor(desc: &str) -> std::result::Result<Vec<Column>, String> {
    let fields: Vec<&str> = desc.split(':').collect();
    if fields.len() % 3 != 0 || fields.is_empty() {
        return Err(format!("malformed Properties descriptor {desc:?}"));
    }
    let mut columns = Vec::new();
    for triple in fields.chunks_exact(3) {
        let name = triple[0].to_string();
        match triple[1] {
            "S" | "R" | "I" | "L" => {}
            t => return Err(format!("unknown property type {t:?} in {desc:?}")),
        }
        let width: usize = triple[2]
            .parse()
            .map_err(|_| format!("bad property count {:?} in {desc:?}", triple[2]))?;
        if width == 0 {
            return Err(format!("zero-width property {name:?}"));
        }
        if (name == "pos" || name == "vel") && width != 3 {
            return Err(format!("{name} must have width 3, got {width}"));
        }
        columns.push(Column { name, width });
    }
    if !columns.iter().any(|c| c.name == "pos") {
        return Err("Properties descriptor lacks pos:R:3".into());
    }
    if !columns.iter().any(|c| c.name == "species") {
        return Err("Properties descriptor lacks species:S:1".into());
    }
    Ok(columns)
}

/// Splits `key=value` entries, honoring double-quoted values.
fn parse_key_values(line: &str) -> std::result::Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    let mut rest = line.trim();
    while !rest.is_empty() {
        let eq = match rest.find('=') {
            Some(i) => i,
            None => {
                // A bare token (no '=') is tolerated and skipped.
                match rest.find(char::is_whitespace) {
                    Some(i) => {
                        rest = rest[i..].trim_start();
                        continue;
                    }
                    None => break,
                }
            }
        };
        let key = rest[..eq].trim().to_string();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(format!("malformed key before '=' in {line:?}"));
        }
        let after = &rest[eq + 1..];
        let (value, remainder) = if let Some(stripped) = after.strip_prefix('"') {
            match stripped.find('"') {
                Some(end) => (stripped[..end].to_string(), &stripped[end + 1..]),
                None => return Err(format!("unterminated quote in {line:?}")),
            }
        } else {
            match after.find(char::is_whitespace) {
                Some(i) => (after[..i].to_string(), &after[i..]),
                None => (after.to_string(), ""),
            }
        };
        out.push((key, value));
        rest = remainder.trim_start();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::build_fcc_lattice;

    fn sample_trajectory() -> Trajectory {
        let s0 = build_fcc_lattice(1, 1, 1, 1.556, "Ar").unwrap();
        let mut v = vec![Vec3::zeros(); 4];
        v[1] = Vec3::new(0.25, -1.5, 3.0e-7);
        let s1 = s0.with_velocities(v).unwrap();
        let s1 = s1
            .with_positions(
                s1.positions()
                    .iter()
                    .map(|p| p + Vec3::new(0.001, -0.002, 0.0031))
                    .collect(),
            )
            .unwrap();
        Trajectory::new(vec![
            Snapshot { time: 0.0, state: s0 },
            Snapshot { time: 0.5, state: s1 },
        ])
        .unwrap()
    }

    #[test]
    fn round_trip_is_bitwise_identical_text() {
        let traj = sample_trajectory();
        let text = format_trajectory(&traj);
        let back = parse_trajectory(&text, "mem").unwrap();
        let text2 = format_trajectory(&back);
        assert_eq!(text, text2);
        assert_eq!(back.len(), 2);
        assert!(back.velocities_present());
        for (a, b) in traj.snapshots().iter().zip(back.snapshots()) {
            assert_eq!(a.time, b.time);
            for (p, q) in a.state.positions().iter().zip(b.state.positions()) {
                assert_eq!(p, q);
            }
            for (p, q) in a.state.velocities().iter().zip(b.state.velocities()) {
                assert_eq!(p, q);
            }
        }
    }

    #[test]
    fn mismatched_atom_count_names_frame() {
        let text = "2\nLattice=\"5 0 0 0 5 0 0 0 5\" Properties=species:S:1:pos:R:3 Time=0\nAr 0 0 0\n";
        let e = parse_trajectory(text, "mem").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("frame 0"), "{msg}");
        assert!(msg.contains("2 atoms"), "{msg}");
    }

    #[test]
    fn missing_velocities_default_to_zero_and_flag() {
        let text = "1\nLattice=\"5 0 0 0 5 0 0 0 5\" Properties=species:S:1:pos:R:3 Time=0\nAr 1 2 3\n";
        let traj = parse_trajectory(text, "mem").unwrap();
        assert!(!traj.velocities_present());
        assert_eq!(traj.snapshots()[0].state.velocities()[0], Vec3::zeros());
        assert_eq!(traj.snapshots()[0].state.positions()[0], Vec3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn malformed_header_is_an_error() {
        let text = "1\nLattice=\"5 0 0\" Properties=species:S:1:pos:R:3\nAr 0 0 0\n";
        assert!(parse_trajectory(text, "mem").is_err());
        let text2 = "not_a_count\nLattice=\"5 0 0 0 5 0 0 0 5\"\nAr 0 0 0\n";
        assert!(parse_trajectory(text2, "mem").is_err());
    }

    #[test]
    fn frames_with_different_counts_are_rejected() {
        let f0 = "1\nLattice=\"5 0 0 0 5 0 0 0 5\" Properties=species:S:1:pos:R:3 Time=0\nAr 0 0 0\n";
        let f1 = "2\nLattice=\"5 0 0 0 5 0 0 0 5\" Properties=species:S:1:pos:R:3 Time=1\nAr 0 0 0\nAr 1 1 1\n";
        let e = parse_trajectory(&format!("{f0}{f1}"), "mem").unwrap_err();
        assert!(e.to_string().contains("frame"), "{e}");
    }
}
