//! Qubit state as a Bloch vector, with the conventions used throughout:
//! z = +1 is the excited state and sits at positive scaled I, rotations are
//! right-handed about the +x / +y axes.

/// Qubit state `(x, y, z)`, each component in [-1, 1] with
/// `x^2 + y^2 + z^2 <= 1` up to rounding.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Rotation generator for the tomography pre-pulses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotationAxis {
    X,
    Y,
}

impl BlochVector {
    /// Excited state, `z = +1`.
    pub const EXCITED: Self = Self {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };
    /// Ground state, `z = -1`.
    pub const GROUND: Self = Self {
        x: 0.0,
        y: 0.0,
        z: -1.0,
    };
    /// The +y pole, the prepared state of the back-action protocol.
    pub const PLUS_Y: Self = Self {
        x: 0.0,
        y: 1.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Pole state for a classical label: +1 maps to excited, -1 to ground.
    pub fn pole(label: i8) -> Self {
        if label > 0 {
            Self::EXCITED
        } else {
            Self::GROUND
        }
    }

    /// Euclidean length of the vector; 1 for a pure state, 0 for the
    /// fully mixed state.
    pub fn purity(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Right-handed rotation by `angle` about the +x or +y axis.
    ///
    /// `R_x(pi/2)` maps the ground state to the +y pole.
    pub fn rotate(&self, axis: RotationAxis, angle: f64) -> Self {
        let (sin, cos) = (angle.sin(), angle.cos());
        match axis {
            RotationAxis::X => Self {
                x: self.x,
                y: self.y * cos - self.z * sin,
                z: self.y * sin + self.z * cos,
            },
            RotationAxis::Y => Self {
                x: self.x * cos + self.z * sin,
                y: self.y,
                z: -self.x * sin + self.z * cos,
            },
        }
    }

    /// Right-handed rotation about +z; only touches the coherence.
    pub fn rotate_z(&self, angle: f64) -> Self {
        let (sin, cos) = (angle.sin(), angle.cos());
        Self {
            x: self.x * cos - self.y * sin,
            y: self.x * sin + self.y * cos,
            z: self.z,
        }
    }
}
