use serde::{Deserialize, Serialize};

use crate::error::{MscfError, Result};

/// Axis-aligned box in pixel coordinates: `(x, y)` is the top-left corner.
/// Width and height are strictly positive by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BoundingBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && w.is_finite() && h.is_finite()) {
            return Err(MscfError::invalid("bounding box fields must be finite"));
        }
        if w <= 0.0 || h <= 0.0 {
            return Err(MscfError::invalid(format!(
                "bounding box dimensions must be positive (got w={w}, h={h})"
            )));
        }
        Ok(BoundingBox { x, y, w, h })
    }

    /// Center point `(cx, cy)`.
    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    /// Rebuilds the box around a new center, keeping its size.
    pub fn with_center(&self, cx: f64, cy: f64) -> BoundingBox {
        BoundingBox {
            x: cx - self.w / 2.0,
            y: cy - self.h / 2.0,
            w: self.w,
            h: self.h,
        }
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn center_is_exact_arithmetic() {
        let b = BoundingBox::new(10.0, 20.0, 30.0, 40.0).unwrap();
        assert_eq!(b.center(), (25.0, 40.0));
    }

    #[test]
    fn rejects_nonpositive_dims() {
        assert!(BoundingBox::new(0.0, 0.0, 0.0, 5.0).is_err());
        assert!(BoundingBox::new(0.0, 0.0, 5.0, -1.0).is_err());
        assert!(BoundingBox::new(0.0, 0.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn with_center_round_trips() {
        let b = BoundingBox::new(3.0, 4.0, 10.0, 6.0).unwrap();
        let (cx, cy) = b.center();
        let b2 = b.with_center(cx, cy);
        assert_eq!(b, b2);
    }
}
