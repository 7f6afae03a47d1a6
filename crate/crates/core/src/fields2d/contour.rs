//! Marching-squares contour extraction with linear interpolation.

use super::grid2d::Field2D;

/// An extracted level line.
#[derive(Debug, Clone)]
pub struct Contour {
    pub level: f64,
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
}

impl Contour {
    pub fn length(&self) -> f64 {
        let mut acc = 0.0;
        for w in self.points.windows(2) {
            acc += f64::hypot(w[1].0 - w[0].0, w[1].1 - w[0].1);
        }
        if self.closed {
            if let (Some(a), Some(b)) = (self.points.first(), self.points.last()) {
                acc += f64::hypot(a.0 - b.0, a.1 - b.1);
            }
        }
        acc
    }
}

/// Extract the level lines of a sampled field at the given levels.
pub fn extract_contours(field: &Field2D, levels: &[f64]) -> Vec<Contour> {
    let mut out = Vec::new();
    for &level in levels {
        out.extend(extract_level(field, level));
    }
    out
}

type SegKey = (i64, i64);

fn key(p: (f64, f64), cell: f64) -> SegKey {
    // quantize to merge shared segment endpoints
    ((p.0 / cell * 1024.0).round() as i64, (p.1 / cell * 1024.0).round() as i64)
}

fn extract_level(field: &Field2D, level: f64) -> Vec<Contour> {
    let g = &field.grid;
    let hx = (g.x1 - g.x0) / (g.nx - 1) as f64;
    let hy = (g.y1 - g.y0) / (g.ny - 1) as f64;
    let cell = hx.min(hy);
    let mut segments: Vec<((f64, f64), (f64, f64))> = Vec::new();

    // Interpolated crossing on an edge between (x_a, v_a) and (x_b, v_b).
    let lerp = |pa: (f64, f64), va: f64, pb: (f64, f64), vb: f64| -> (f64, f64) {
        let t = if (vb - va).abs() < 1e-300 {
            0.5
        } else {
            ((level - va) / (vb - va)).clamp(0.0, 1.0)
        };
        (pa.0 + t * (pb.0 - pa.0), pa.1 + t * (pb.1 - pa.1))
    };

    for j in 0..g.ny - 1 {
        for i in 0..g.nx - 1 {
            let p = [
                (g.x(i), g.y(j)),
                (g.x(i + 1), g.y(j)),
                (g.x(i + 1), g.y(j + 1)),
                (g.x(i), g.y(j + 1)),
            ];
            let v = [
                field.value(i, j),
                field.value(i + 1, j),
                field.value(i + 1, j + 1),
                field.value(i, j + 1),
            ];
            let mut case = 0usize;
            for (k, val) in v.iter().enumerate() {
                if *val > level {
                    case |= 1 << k;
                }
            }
            if case == 0 || case == 15 {
                continue;
            }
            // Edge crossings: edges 0:(0-1) 1:(1-2) 2:(2-3) 3:(3-0)
            let e = |k: usize| -> (f64, f64) {
                let (a, b) = (k, (k + 1) % 4);
                lerp(p[a], v[a], p[b], v[b])
            };
            let mut push = |a: usize, b: usize| segments.push((e(a), e(b)));
            match case {
                1 | 14 => push(3, 0),
                2 | 13 => push(0, 1),
                3 | 12 => push(3, 1),
                4 | 11 => push(1, 2),
                6 | 9 => push(0, 2),
                7 | 8 => push(3, 2),
                5 | 10 => {
                    // saddle: resolve by the cell-center average
                    let center = (v[0] + v[1] + v[2] + v[3]) / 4.0;
                    if (center > level) == (case == 5) {
                        push(3, 0);
                        push(1, 2);
                    } else {
                        push(0, 1);
                        push(3, 2);
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    chain_segments(segments, level, cell)
}

/// Join segments into polylines by matching quantized endpoints.
fn chain_segments(
    segments: Vec<((f64, f64), (f64, f64))>,
    level: f64,
    cell: f64,
) -> Vec<Contour> {
    use std::collections::HashMap;
    let mut adjacency: HashMap<SegKey, Vec<usize>> = HashMap::new();
    for (idx, (a, b)) in segments.iter().enumerate() {
        adjacency.entry(key(*a, cell)).or_default().push(idx);
        adjacency.entry(key(*b, cell)).or_default().push(idx);
    }
    let mut used = vec![false; segments.len()];
    let mut contours = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a0, b0) = segments[start];
        let mut points = vec![a0, b0];
        // extend forward from the tail, then backward from the head
        for _pass in 0..2 {
            loop {
                let tail = *points.last().unwrap();
                let k = key(tail, cell);
                let mut next = None;
                if let Some(cands) = adjacency.get(&k) {
                    for &c in cands {
                        if !used[c] {
                            next = Some(c);
                            break;
                        }
                    }
                }
                match next {
                    Some(c) => {
                        used[c] = true;
                        let (a, b) = segments[c];
                        if key(a, cell) == k {
                            points.push(b);
                        } else {
                            points.push(a);
                        }
                    }
                    None => break,
                }
            }
            points.reverse();
        }
        let closed = points.len() > 2
            && key(*points.first().unwrap(), cell) == key(*points.last().unwrap(), cell);
        if closed {
            points.pop();
        }
        contours.push(Contour {
            level,
            points,
            closed,
        });
    }
    contours
}

/// Polyline CSV: `level,segment,closed,x,y` rows.
pub fn contours_to_csv(contours: &[Contour], header_meta: &str) -> String {
    let mut out = String::new();
    out.push_str(&format!("# {header_meta}\n"));
    out.push_str("level,segment,closed,x,y\n");
    for (s, c) in contours.iter().enumerate() {
        for p in &c.points {
            out.push_str(&format!("{},{},{},{},{}\n", c.level, s, c.closed as u8, p.0, p.1));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields2d::grid2d::Grid2D;

    fn circle_field(radius: f64) -> Field2D {
        let grid = Grid2D::centered(2.0, 2.0, 256, 256).unwrap();
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let (x, y) = (grid.x(i), grid.y(j));
                values.push(x * x + y * y - radius * radius);
            }
        }
        Field2D { grid, values }
    }

    #[test]
    fn circle_contour_length() {
        let f = circle_field(1.2);
        let cs = extract_contours(&f, &[0.0]);
        assert_eq!(cs.len(), 1);
        let c = &cs[0];
        assert!(c.closed, "circle should close");
        let expect = 2.0 * std::f64::consts::PI * 1.2;
        assert!(
            (c.length() - expect).abs() < 0.01 * expect,
            "length {} vs {}",
            c.length(),
            expect
        );
    }

    #[test]
    fn empty_level_gives_no_contours() {
        let f = circle_field(1.0);
        let cs = extract_contours(&f, &[100.0]);
        assert!(cs.is_empty());
    }
}
