use alloc::vec;
use alloc::vec::Vec;

use super::config::PhotometricConfig;
use super::{AugmentedSample, OpKind, Provenance};
use crate::image::{offset_clamp, round_clamp, PixelImage, CHANNELS};
use crate::label::Sample;
use crate::rng::RandomSource;

/// Direction of a linear motion-blur kernel. Image y grows downward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlurAngle {
    Deg0,
    Deg45,
    Deg90,
    Deg135,
}

impl BlurAngle {
    pub const ALL: [BlurAngle; 4] = [
        BlurAngle::Deg0,
        BlurAngle::Deg45,
        BlurAngle::Deg90,
        BlurAngle::Deg135,
    ];

    /// Pixel step `(dx, dy)` between consecutive kernel taps.
    pub fn step(self) -> (i64, i64) {
        match self {
            BlurAngle::Deg0 => (1, 0),
            BlurAngle::Deg45 => (1, 1),
            BlurAngle::Deg90 => (0, 1),
            BlurAngle::Deg135 => (-1, 1),
        }
    }
}

/// Normalized box kernel of `len` taps along `angle`; out-of-image taps read
/// the nearest border pixel. Tap `k` sits at offset `k - (len - 1) / 2`.
pub fn motion_blur(image: &PixelImage, len: u32, angle: BlurAngle) -> PixelImage {
    if len <= 1 {
        return image.clone();
    }
    let (w, h) = image.dimensions();
    let (dx, dy) = angle.step();
    let start = -(i64::from(len - 1) / 2);
    let taps: Vec<(i64, i64)> = (0..i64::from(len))
        .map(|k| ((start + k) * dx, (start + k) * dy))
        .collect();
    let n = u64::from(len);
    let src = image.data();
    let mut out = vec![0u8; src.len()];
    for y in 0..h {
        for x in 0..w {
            let mut acc = [0u64; CHANNELS];
            for &(ox, oy) in &taps {
                let sx = (x as i64 + ox).clamp(0, w as i64 - 1) as usize;
                let sy = (y as i64 + oy).clamp(0, h as i64 - 1) as usize;
                let o = (sy * w + sx) * CHANNELS;
                for c in 0..CHANNELS {
                    acc[c] += u64::from(src[o + c]);
                }
            }
            let o = (y * w + x) * CHANNELS;
            for c in 0..CHANNELS {
                // round half up == half away from zero for non-negative sums
                out[o + c] = ((2 * acc[c] + n) / (2 * n)) as u8;
            }
        }
    }
    PixelImage::new(w, h, out).expect("same dimensions")
}

pub fn rgb_shift(image: &PixelImage, offsets: [i32; 3]) -> PixelImage {
    let mut out = image.clone();
    for px in out.data_mut().chunks_exact_mut(CHANNELS) {
        for (v, &d) in px.iter_mut().zip(&offsets) {
            *v = offset_clamp(*v, d);
        }
    }
    out
}

/// `round(mean_c + alpha * (v - mean_c))` with the mean taken per channel
/// over the whole image.
pub fn adjust_contrast(image: &PixelImage, alpha: f64) -> PixelImage {
    let mut sums = [0u64; CHANNELS];
    for px in image.data().chunks_exact(CHANNELS) {
        for c in 0..CHANNELS {
            sums[c] += u64::from(px[c]);
        }
    }
    let n = (image.width() * image.height()) as f64;
    let means = sums.map(|s| s as f64 / n);
    let mut out = image.clone();
    for px in out.data_mut().chunks_exact_mut(CHANNELS) {
        for c in 0..CHANNELS {
            px[c] = round_clamp(means[c] + alpha * (f64::from(px[c]) - means[c]));
        }
    }
    out
}

/// Applies blur, then RGB shift, then contrast, each with its own
/// probability. Every stage consumes its Bernoulli draw even when skipped.
pub fn photometric(s: &Sample, cfg: &PhotometricConfig, rng: &mut RandomSource) -> AugmentedSample {
    let mut image = s.image.clone();
    if rng.bernoulli(cfg.blur_prob) {
        let angle = BlurAngle::ALL[rng.below(4) as usize];
        image = motion_blur(&image, cfg.blur_len, angle);
    }
    if rng.bernoulli(cfg.rgb_shift_prob) {
        let m = i64::from(cfg.rgb_shift_max);
        let offsets = [(); 3].map(|_| rng.range_i64(-m, m) as i32);
        image = rgb_shift(&image, offsets);
    }
    if rng.bernoulli(cfg.contrast_prob) {
        let alpha = rng.uniform(1.0 - cfg.contrast_max, 1.0 + cfg.contrast_max);
        image = adjust_contrast(&image, alpha);
    }
    let mut out = AugmentedSample::from_sample(Sample::new(s.id.clone(), image, s.labels.clone()));
    out.provenance.push(Provenance {
        op: OpKind::Photometric,
        partners: Vec::new(),
        draw_digest: rng.draw_digest(),
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;
    use proptest::prelude::*;

    fn gradient(w: usize, h: usize) -> PixelImage {
        let mut img = PixelImage::filled(w, h, [0, 0, 0]);
        for y in 0..h {
            for x in 0..w {
                img.set_pixel(x, y, [(x * 20) as u8, (y * 30) as u8, ((x + y) * 7) as u8]);
            }
        }
        img
    }

    #[test]
    fn zero_probabilities_are_identity() {
        let s = Sample::new("1", gradient(7, 5), Vec::new());
        let cfg = PhotometricConfig {
            blur_prob: 0.0,
            rgb_shift_prob: 0.0,
            contrast_prob: 0.0,
            ..PhotometricConfig::default()
        };
        for seed in 0..10 {
            assert_eq!(
                photometric(&s, &cfg, &mut derive_stream(seed, &[])).sample,
                s
            );
        }
    }

    #[test]
    fn constant_image_shift() {
        let img = PixelImage::filled(3, 3, [100, 100, 100]);
        let out = rgb_shift(&img, [10, -10, 0]);
        assert!(out.data().chunks(3).all(|p| p == [110, 90, 100]));
        let sat = rgb_shift(&img, [200, -200, 0]);
        assert_eq!(sat.pixel(0, 0), [255, 0, 100]);
    }

    #[test]
    fn contrast_unit_alpha_is_identity() {
        let img = gradient(9, 4);
        assert_eq!(adjust_contrast(&img, 1.0), img);
    }

    #[test]
    fn contrast_zero_alpha_flattens_to_mean() {
        let mut img = PixelImage::filled(2, 1, [0, 0, 0]);
        img.set_pixel(1, 0, [11, 10, 0]);
        // means 5.5, 5, 0 -> 6 (half away from zero), 5, 0
        let out = adjust_contrast(&img, 0.0);
        assert_eq!(out.pixel(0, 0), [6, 5, 0]);
        assert_eq!(out.pixel(1, 0), [6, 5, 0]);
    }

    #[test]
    fn blur_constant_image_is_fixed_point() {
        let img = PixelImage::filled(6, 6, [42, 7, 255]);
        for a in BlurAngle::ALL {
            assert_eq!(motion_blur(&img, 5, a), img);
        }
    }

    #[test]
    fn blur_horizontal_hand_computed() {
        // row: 0 30 60 90, len 3, clamp borders
        let mut img = PixelImage::filled(4, 1, [0, 0, 0]);
        for x in 0..4 {
            img.set_pixel(x, 0, [(x * 30) as u8; 3]);
        }
        let out = motion_blur(&img, 3, BlurAngle::Deg0);
        let row: Vec<u8> = (0..4).map(|x| out.pixel(x, 0)[0]).collect();
        // (0+0+30)/3=10, (0+30+60)/3=30, 60, (60+90+90)/3=80
        assert_eq!(row, [10, 30, 60, 80]);
        // vertical blur of a single row is the identity
        assert_eq!(motion_blur(&img, 3, BlurAngle::Deg90), img);
    }

    fn naive_blur(img: &PixelImage, len: u32, angle: BlurAngle) -> PixelImage {
        let (w, h) = img.dimensions();
        let (dx, dy) = angle.step();
        let mut out = img.clone();
        for y in 0..h {
            for x in 0..w {
                let mut px = [0u8; 3];
                for (c, v) in px.iter_mut().enumerate() {
                    let mut sum = 0.0;
                    for k in 0..len as i64 {
                        let off = k - (len as i64 - 1) / 2;
                        let sx = (x as i64 + off * dx).max(0).min(w as i64 - 1) as usize;
                        let sy = (y as i64 + off * dy).max(0).min(h as i64 - 1) as usize;
                        sum += img.pixel(sx, sy)[c] as f64;
                    }
                    *v = round_clamp(sum / len as f64);
                }
                out.set_pixel(x, y, px);
            }
        }
        out
    }

    proptest! {
        #[test]
        fn blur_matches_naive(w in 1usize..10, h in 1usize..10, len in 1u32..8, a in 0usize..4,
                              seed in any::<u64>()) {
            let mut rng = derive_stream(seed, &[]);
            let data: Vec<u8> = (0..w * h * 3).map(|_| rng.below(256) as u8).collect();
            let img = PixelImage::new(w, h, data).unwrap();
            prop_assert_eq!(motion_blur(&img, len, BlurAngle::ALL[a]), naive_blur(&img, len, BlurAngle::ALL[a]));
        }
    }
}
