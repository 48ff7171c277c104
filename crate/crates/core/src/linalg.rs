//! Minimal dense solves shared by the fitters.

/// Solve a 3×3 system given as an augmented matrix, by Gaussian
/// elimination with partial pivoting. Returns None when singular.
pub(crate) fn solve3(mut m: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in col..4 {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    Some([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_identity_system() {
        let m = [
            [1.0, 0.0, 0.0, 2.0],
            [0.0, 1.0, 0.0, 3.0],
            [0.0, 0.0, 1.0, 4.0],
        ];
        assert_eq!(solve3(m), Some([2.0, 3.0, 4.0]));
    }

    #[test]
    fn singular_system_is_none() {
        let m = [
            [1.0, 1.0, 0.0, 2.0],
            [2.0, 2.0, 0.0, 4.0],
            [0.0, 0.0, 1.0, 1.0],
        ];
        assert_eq!(solve3(m), None);
    }
}
