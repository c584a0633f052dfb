use alloc::vec::Vec;

use super::raster::{round_index, RasterImage};
use super::SceneError;

/// Builds an image whose column `f` is column `round(column_start + rate * f)`
/// of frame `f`. `rate = 0` is a pushbroom panorama.
pub fn stitch_panorama(
    frames: &[RasterImage],
    column_start: f64,
    rate: f64,
) -> Result<RasterImage, SceneError> {
    let first = frames.first().ok_or(SceneError::NoFrames)?;
    if let Some(frame) = frames.iter().position(|f| !f.same_layout(first)) {
        return Err(SceneError::FrameMismatch { frame });
    }
    let columns: Vec<usize> = frames
        .iter()
        .enumerate()
        .map(|(f, img)| {
            let column = round_index(column_start + rate * f as f64);
            if column < 0 || column >= img.width() as i64 || !(column_start + rate * f as f64).is_finite() {
                Err(SceneError::ColumnOutOfRange { frame: f, column })
            } else {
                Ok(column as usize)
            }
        })
        .collect::<Result<_, _>>()?;
    let mut out = first.blank_like(frames.len());
    for (f, (img, &col)) in frames.iter().zip(&columns).enumerate() {
        out.copy_column(f, img, col);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn striped(width: usize, height: usize, tag: u8) -> RasterImage {
        let mut img = RasterImage::rgb(width, height, [0, 0, 0]);
        for x in 0..width {
            for y in 0..height {
                img.put_rgb(x, y, [tag, x as u8, y as u8]);
            }
        }
        img
    }

    #[test]
    fn linear_columns() {
        let frames = vec![striped(4, 3, 0), striped(4, 3, 1)];
        let pano = stitch_panorama(&frames, 0.0, 1.0).unwrap();
        assert_eq!((pano.width(), pano.height()), (2, 3));
        assert_eq!(pano.rgb_at(0, 2), [0, 0, 2]);
        assert_eq!(pano.rgb_at(1, 2), [1, 1, 2]);
    }

    #[test]
    fn pushbroom() {
        let frames: Vec<_> = (0..5).map(|t| striped(6, 2, t)).collect();
        let pano = stitch_panorama(&frames, 3.0, 0.0).unwrap();
        assert!((0..5).all(|f| pano.rgb_at(f, 0) == [f as u8, 3, 0]));
    }

    #[test]
    fn single_frame() {
        let pano = stitch_panorama(&[striped(6, 2, 9)], 2.0, 0.0).unwrap();
        assert_eq!((pano.width(), pano.height()), (1, 2));
    }

    #[test]
    fn errors() {
        assert_eq!(stitch_panorama(&[], 0.0, 0.0), Err(SceneError::NoFrames));
        let frames = vec![striped(4, 3, 0), striped(5, 3, 1)];
        assert_eq!(
            stitch_panorama(&frames, 0.0, 0.0),
            Err(SceneError::FrameMismatch { frame: 1 })
        );
        let frames = vec![striped(4, 3, 0), striped(4, 3, 1)];
        assert_eq!(
            stitch_panorama(&frames, 3.0, 1.0),
            Err(SceneError::ColumnOutOfRange { frame: 1, column: 4 })
        );
    }
}
