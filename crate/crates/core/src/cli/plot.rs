//! Minimal static charts: a polyline with markers and a gray-level heatmap.

use image::{Rgb, RgbImage};

const W: u32 = 480;
const H: u32 = 320;
const MARGIN: u32 = 30;

fn set(img: &mut RgbImage, x: i64, y: i64, c: Rgb<u8>) {
    if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
        img.put_pixel(x as u32, y as u32, c);
    }
}

fn line(img: &mut RgbImage, (x0, y0): (i64, i64), (x1, y1): (i64, i64), c: Rgb<u8>) {
    let steps = (x1 - x0).abs().max((y1 - y0).abs()).max(1);
    for s in 0..=steps {
        let x = x0 + (x1 - x0) * s / steps;
        let y = y0 + (y1 - y0) * s / steps;
        set(img, x, y, c);
    }
}

fn frame() -> RgbImage {
    let mut img = RgbImage::from_pixel(W, H, Rgb([255, 255, 255]));
    let axis = Rgb([0, 0, 0]);
    let (l, b) = (MARGIN as i64, (H - MARGIN) as i64);
    line(&mut img, (l, b), ((W - MARGIN / 2) as i64, b), axis);
    line(&mut img, (l, b), (l, (MARGIN / 2) as i64), axis);
    img
}

/// Points joined in order, scaled to fill the plot area; `log_x` plots
/// x on a log10 axis.
pub fn line_chart(points: &[(f64, f64)], log_x: bool) -> RgbImage {
    let mut img = frame();
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| y.is_finite() && (!log_x || *x > 0.0))
        .map(|&(x, y)| (if log_x { x.log10() } else { x }, y))
        .collect();
    if pts.is_empty() {
        return img;
    }
    let span = |v: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        if hi > lo {
            (lo, hi)
        } else {
            (lo - 0.5, lo + 0.5)
        }
    };
    let (x0, x1) = span(&mut pts.iter().map(|p| p.0));
    let (y0, y1) = span(&mut pts.iter().map(|p| p.1));
    let pw = f64::from(W - MARGIN - MARGIN / 2 - 4);
    let ph = f64::from(H - MARGIN - MARGIN / 2 - 4);
    let to_px = |(x, y): (f64, f64)| {
        (
            (f64::from(MARGIN + 2) + (x - x0) / (x1 - x0) * pw) as i64,
            (f64::from(H - MARGIN - 2) - (y - y0) / (y1 - y0) * ph) as i64,
        )
    };
    let blue = Rgb([30, 80, 200]);
    for w in pts.windows(2) {
        line(&mut img, to_px(w[0]), to_px(w[1]), blue);
    }
    for &p in &pts {
        let (x, y) = to_px(p);
        for dx in -2..=2 {
            for dy in -2..=2 {
                set(&mut img, x + dx, y + dy, blue);
            }
        }
    }
    img
}

/// Row-major `values` with `cols` columns; darker is higher.
pub fn heatmap(values: &[f64], cols: usize) -> RgbImage {
    let mut img = frame();
    if values.is_empty() || cols == 0 {
        return img;
    }
    let rows = values.len().div_ceil(cols);
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let cw = (W - MARGIN - MARGIN / 2 - 4) / cols as u32;
    let ch = (H - MARGIN - MARGIN / 2 - 4) / rows as u32;
    for (k, &v) in values.iter().enumerate() {
        let t = if hi > lo { (v - lo) / (hi - lo) } else { 1.0 };
        let g = (255.0 * (1.0 - t)) as u8;
        let (r, c) = (k / cols, k % cols);
        for y in 0..ch {
            for x in 0..cw {
                let px = MARGIN + 2 + c as u32 * cw + x;
                let py = MARGIN / 2 + 2 + r as u32 * ch + y;
                img.put_pixel(px, py, Rgb([g, g, g]));
            }
        }
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_marks_points() {
        let img = line_chart(&[(0.0, 3.0), (1.0, 2.0), (2.0, 1.5)], false);
        assert_eq!(img.dimensions(), (W, H));
        assert!(img.pixels().any(|p| *p == Rgb([30, 80, 200])));
    }

    #[test]
    fn heatmap_extremes() {
        let img = heatmap(&[0.0, 1.0, 0.5, 0.25], 2);
        assert!(img.pixels().any(|p| *p == Rgb([0, 0, 0])));
        assert!(line_chart(&[], true).pixels().all(|p| p.0[1] == 255 || p.0 == [0, 0, 0]));
    }
}
