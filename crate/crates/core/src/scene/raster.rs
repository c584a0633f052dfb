//! Scanline rasterization without anti-aliasing.
//!
//! A pixel is covered by a polygon when its centre is inside (even-odd rule,
//! half-open edges). Curves are stroked one pixel wide by stepping along each
//! sample-to-sample segment. Primitives are painted far to near.

use alloc::vec;
use alloc::vec::Vec;

use super::render::{ObservationKind, VectorObservation};
use super::{Rgb, SceneError};
use crate::camera::Point2;
use crate::math::round;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pixels {
    Rgb8(Vec<u8>),
    Gray16(Vec<u16>),
}

/// Row-major image, origin at the top-left pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    pixels: Pixels,
}

impl RasterImage {
    pub fn rgb(width: usize, height: usize, fill: Rgb) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            data.extend_from_slice(&fill);
        }
        Self {
            width,
            height,
            pixels: Pixels::Rgb8(data),
        }
    }

    pub fn gray16(width: usize, height: usize, data: Vec<u16>) -> Result<Self, SceneError> {
        if data.len() != width * height {
            return Err(SceneError::EmptyImage);
        }
        Ok(Self {
            width,
            height,
            pixels: Pixels::Gray16(data),
        })
    }

    pub fn from_rgb(width: usize, height: usize, data: Vec<u8>) -> Result<Self, SceneError> {
        if data.len() != width * height * 3 {
            return Err(SceneError::EmptyImage);
        }
        Ok(Self {
            width,
            height,
            pixels: Pixels::Rgb8(data),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &Pixels {
        &self.pixels
    }

    pub fn same_layout(&self, other: &RasterImage) -> bool {
        self.width == other.width
            && self.height == other.height
            && core::mem::discriminant(&self.pixels) == core::mem::discriminant(&other.pixels)
    }

    /// RGB at `(x, y)`; gray images return the high byte replicated.
    pub fn rgb_at(&self, x: usize, y: usize) -> Rgb {
        let i = y * self.width + x;
        match &self.pixels {
            Pixels::Rgb8(d) => [d[3 * i], d[3 * i + 1], d[3 * i + 2]],
            Pixels::Gray16(d) => {
                let g = (d[i] >> 8) as u8;
                [g, g, g]
            }
        }
    }

    pub fn put_rgb(&mut self, x: usize, y: usize, c: Rgb) {
        let i = y * self.width + x;
        match &mut self.pixels {
            Pixels::Rgb8(d) => d[3 * i..3 * i + 3].copy_from_slice(&c),
            Pixels::Gray16(d) => {
                let g = (c[0] as u32 + c[1] as u32 + c[2] as u32) / 3;
                d[i] = (g * 257) as u16;
            }
        }
    }

    /// Copies column `src_x` of `src` into column `dst_x` of `self`.
    pub(crate) fn copy_column(&mut self, dst_x: usize, src: &RasterImage, src_x: usize) {
        for y in 0..self.height {
            let (di, si) = (y * self.width + dst_x, y * src.width + src_x);
            match (&mut self.pixels, &src.pixels) {
                (Pixels::Rgb8(d), Pixels::Rgb8(s)) => {
                    d[3 * di..3 * di + 3].copy_from_slice(&s[3 * si..3 * si + 3])
                }
                (Pixels::Gray16(d), Pixels::Gray16(s)) => d[di] = s[si],
                _ => unreachable!("layouts checked by caller"),
            }
        }
    }

    pub(crate) fn blank_like(&self, width: usize) -> RasterImage {
        let pixels = match self.pixels {
            Pixels::Rgb8(_) => Pixels::Rgb8(vec![0; width * self.height * 3]),
            Pixels::Gray16(_) => Pixels::Gray16(vec![0; width * self.height]),
        };
        RasterImage {
            width,
            height: self.height,
            pixels,
        }
    }
}

/// Maps sensor coordinates to pixels: `center` lands in the middle of the
/// image, `scale` is pixels per scene unit, `v` points up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageSpec {
    pub width: usize,
    pub height: usize,
    pub scale: f64,
    pub center: Point2,
    pub background: Rgb,
}

impl ImageSpec {
    /// Fits the bounding box of `observations` with a relative `margin` on each side.
    pub fn fit(observations: &[VectorObservation], width: usize, height: usize, margin: f64) -> Self {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in observations.iter().flat_map(|o| o.points.iter()) {
            lo = Point2::new(lo.u.min(p.u), lo.v.min(p.v));
            hi = Point2::new(hi.u.max(p.u), hi.v.max(p.v));
        }
        if !lo.u.is_finite() {
            return Self {
                width,
                height,
                scale: 1.0,
                center: Point2::default(),
                background: [0, 0, 0],
            };
        }
        let (du, dv) = ((hi.u - lo.u).max(1e-300), (hi.v - lo.v).max(1e-300));
        let usable = 1.0 - 2.0 * margin;
        let scale = (usable * width as f64 / du).min(usable * height as f64 / dv);
        Self {
            width,
            height,
            scale,
            center: Point2::new(0.5 * (lo.u + hi.u), 0.5 * (lo.v + hi.v)),
            background: [0, 0, 0],
        }
    }

    pub fn with_background(mut self, c: Rgb) -> Self {
        self.background = c;
        self
    }

    /// Continuous pixel coordinates; pixel `(i, j)` spans `[i, i+1) x [j, j+1)`.
    pub fn to_pixel(&self, p: Point2) -> (f64, f64) {
        (
            (p.u - self.center.u) * self.scale + 0.5 * self.width as f64,
            0.5 * self.height as f64 - (p.v - self.center.v) * self.scale,
        )
    }

    /// Integer pixel containing `p`, if inside the frame.
    pub fn pixel_of(&self, p: Point2) -> Option<(usize, usize)> {
        let (x, y) = self.to_pixel(p);
        let (xf, yf) = (libm::floor(x), libm::floor(y));
        (xf >= 0.0 && yf >= 0.0 && xf < self.width as f64 && yf < self.height as f64)
            .then_some((xf as usize, yf as usize))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub image: RasterImage,
    /// Ground-truth depth of the front-most primitive per pixel.
    pub depth: Vec<Option<f64>>,
    /// Ids of primitives with samples outside the frame.
    pub out_of_frame: Vec<u32>,
}

struct Canvas<'a> {
    spec: &'a ImageSpec,
    image: RasterImage,
    depth: Vec<Option<f64>>,
}

impl Canvas<'_> {
    fn set(&mut self, x: i64, y: i64, c: Rgb, z: f64) {
        if x < 0 || y < 0 || x as usize >= self.spec.width || y as usize >= self.spec.height {
            return;
        }
        let (x, y) = (x as usize, y as usize);
        self.image.put_rgb(x, y, c);
        self.depth[y * self.spec.width + x] = Some(z);
    }

    fn fill_polygon(&mut self, pts: &[(f64, f64)], c: Rgb, z: f64) {
        if pts.len() < 3 {
            return;
        }
        let ymin = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let ymax = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let row0 = libm::floor(ymin - 0.5).max(0.0) as i64;
        let row1 = (libm::ceil(ymax - 0.5) as i64).min(self.spec.height as i64 - 1);
        let mut xs: Vec<f64> = Vec::new();
        for row in row0..=row1 {
            let yc = row as f64 + 0.5;
            xs.clear();
            for i in 0..pts.len() {
                let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
                if (a.1 <= yc && yc < b.1) || (b.1 <= yc && yc < a.1) {
                    xs.push(a.0 + (yc - a.1) * (b.0 - a.0) / (b.1 - a.1));
                }
            }
            xs.sort_by(f64::total_cmp);
            for span in xs.chunks_exact(2) {
                // centres i + 0.5 in [x0, x1)
                let first = libm::ceil(span[0] - 0.5) as i64;
                let last = libm::ceil(span[1] - 0.5) as i64 - 1;
                for col in first.max(0)..=last.min(self.spec.width as i64 - 1) {
                    self.set(col, row, c, z);
                }
            }
        }
    }

    fn stroke(&mut self, a: (f64, f64), b: (f64, f64), c: Rgb, za: f64, zb: f64) {
        let steps = libm::ceil((b.0 - a.0).abs().max((b.1 - a.1).abs())).max(1.0);
        // avoid absurd work on segments far outside the frame
        let steps = steps.min(4.0 * (self.spec.width + self.spec.height) as f64) as i64;
        for s in 0..=steps {
            let t = s as f64 / steps as f64;
            let x = a.0 + t * (b.0 - a.0);
            let y = a.1 + t * (b.1 - a.1);
            self.set(
                libm::floor(x) as i64,
                libm::floor(y) as i64,
                c,
                za + t * (zb - za),
            );
        }
    }
}

/// Paints observations far to near into a fresh image.
pub fn rasterize(observations: &[VectorObservation], spec: &ImageSpec) -> Result<Raster, SceneError> {
    if spec.width == 0 || spec.height == 0 || !(spec.scale > 0.0) {
        return Err(SceneError::EmptyImage);
    }
    let mut canvas = Canvas {
        spec,
        image: RasterImage::rgb(spec.width, spec.height, spec.background),
        depth: vec![None; spec.width * spec.height],
    };
    let mut order: Vec<usize> = (0..observations.len()).collect();
    order.sort_by(|&a, &b| {
        observations[b]
            .mean_depth()
            .total_cmp(&observations[a].mean_depth())
            .then(a.cmp(&b))
    });

    let mut out_of_frame = Vec::new();
    for &i in &order {
        let o = &observations[i];
        let px: Vec<(f64, f64)> = o.points.iter().map(|&p| spec.to_pixel(p)).collect();
        let outside = px.iter().any(|&(x, y)| {
            !(x >= 0.0 && y >= 0.0 && x <= spec.width as f64 && y <= spec.height as f64)
        });
        if outside {
            out_of_frame.push(o.id);
        }
        match o.kind {
            ObservationKind::Polygon => canvas.fill_polygon(&px, o.color, o.depth.0),
            ObservationKind::Ellipse | ObservationKind::Polyline => {
                for k in 1..px.len() {
                    canvas.stroke(px[k - 1], px[k], o.color, o.depth_at(k - 1), o.depth_at(k));
                }
                if o.kind == ObservationKind::Ellipse && px.len() > 2 {
                    let last = px.len() - 1;
                    canvas.stroke(px[last], px[0], o.color, o.depth.0, o.depth.0);
                }
            }
        }
    }
    out_of_frame.sort_unstable();
    out_of_frame.dedup();
    Ok(Raster {
        image: canvas.image,
        depth: canvas.depth,
        out_of_frame,
    })
}

/// Rounds half away from zero, as used for column selection.
pub(crate) fn round_index(x: f64) -> i64 {
    round(x) as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect_obs(u0: f64, v0: f64, u1: f64, v1: f64, z: f64) -> VectorObservation {
        VectorObservation {
            id: 1,
            color: [200, 10, 10],
            kind: ObservationKind::Polygon,
            points: vec![
                Point2::new(u0, v0),
                Point2::new(u1, v0),
                Point2::new(u1, v1),
                Point2::new(u0, v1),
            ],
            depth: (z, z),
        }
    }

    fn unit_spec(w: usize, h: usize) -> ImageSpec {
        // scene unit = pixel, sensor origin at the top-left corner
        ImageSpec {
            width: w,
            height: h,
            scale: 1.0,
            center: Point2::new(0.5 * w as f64, -0.5 * h as f64),
            background: [0, 0, 0],
        }
    }

    #[test]
    fn filled_rect_area() {
        let spec = unit_spec(40, 30);
        let r = rasterize(&[rect_obs(5.0, -3.0, 15.0, -8.0, 7.0)], &spec).unwrap();
        let count = r.depth.iter().filter(|d| d.is_some()).count();
        assert_eq!(count, 50);
        assert!(r.out_of_frame.is_empty());
        assert_eq!(r.image.rgb_at(5, 3), [200, 10, 10]);
        assert_eq!(r.image.rgb_at(4, 3), [0, 0, 0]);
    }

    #[test]
    fn near_paints_over_far() {
        let spec = unit_spec(20, 20);
        let mut near = rect_obs(0.0, 0.0, 10.0, -10.0, 3.0);
        near.color = [0, 255, 0];
        let far = rect_obs(5.0, -5.0, 15.0, -15.0, 9.0);
        let r = rasterize(&[near, far], &spec).unwrap();
        assert_eq!(r.image.rgb_at(7, 7), [0, 255, 0]);
        assert_eq!(r.depth[7 * 20 + 7], Some(3.0));
        assert_eq!(r.depth[12 * 20 + 12], Some(9.0));
    }

    #[test]
    fn deterministic() {
        let spec = unit_spec(64, 64);
        let obs = [rect_obs(3.3, -2.7, 40.1, -50.2, 5.0)];
        assert_eq!(rasterize(&obs, &spec).unwrap(), rasterize(&obs, &spec).unwrap());
    }

    #[test]
    fn out_of_frame_reported() {
        let spec = unit_spec(10, 10);
        let r = rasterize(&[rect_obs(-5.0, -1.0, 5.0, -5.0, 2.0)], &spec).unwrap();
        assert_eq!(r.out_of_frame, [1]);
    }
}
