use nalgebra::{DMatrix, DVector, Isometry3, Point3, Rotation3, Unit, UnitQuaternion, Vector3};

use super::model::{check_len, RobotModel};
use crate::error::{Error, Result};

/// World-frame placement of every joint for one configuration.
#[derive(Debug, Clone)]
pub(crate) struct ChainPose {
    /// Joint frame after applying the joint rotation.
    pub frames: Vec<Isometry3<f64>>,
    /// Rotation axis in world coordinates.
    pub axes: Vec<Vector3<f64>>,
}

impl ChainPose {
    pub fn origin(&self, i: usize) -> Vector3<f64> {
        self.frames[i].translation.vector
    }

    pub fn point(&self, frame: usize, local: &Vector3<f64>) -> Vector3<f64> {
        (self.frames[frame] * Point3::from(*local)).coords
    }

    pub fn com(&self, model: &RobotModel, i: usize) -> Vector3<f64> {
        self.point(i, &model.joints[i].link_com)
    }

    pub fn rotation(&self, i: usize) -> Rotation3<f64> {
        self.frames[i].rotation.to_rotation_matrix()
    }
}

impl RobotModel {
    pub(crate) fn chain_pose(&self, q: &DVector<f64>) -> ChainPose {
        assert_eq!(q.len(), self.dof(), "configuration length must match the model");
        let mut frames = Vec::with_capacity(self.dof());
        let mut axes = Vec::with_capacity(self.dof());
        let mut parent = Isometry3::identity();
        for (j, &qi) in self.joints.iter().zip(q.iter()) {
            let axis = Unit::new_unchecked(j.axis);
            let joint = parent * j.origin * UnitQuaternion::from_axis_angle(&axis, qi);
            axes.push(joint.rotation * j.axis);
            frames.push(joint);
            parent = joint;
        }
        ChainPose { frames, axes }
    }

    pub(crate) fn check_frame(&self, frame: usize) -> Result<()> {
        if frame < self.dof() {
            Ok(())
        } else {
            Err(Error::FrameOutOfRange {
                frame,
                dof: self.dof(),
            })
        }
    }

    /// World position of `local_point` rigidly attached to link `frame`.
    pub fn forward_kinematics(
        &self,
        q: &DVector<f64>,
        frame: usize,
        local_point: &Vector3<f64>,
    ) -> Result<Vector3<f64>> {
        self.check_frame(frame)?;
        check_len("q", self.dof(), q.len())?;
        Ok(self.chain_pose(q).point(frame, local_point))
    }

    /// Positional Jacobian (3×n) of the attached point.
    pub fn jacobian(
        &self,
        q: &DVector<f64>,
        frame: usize,
        local_point: &Vector3<f64>,
    ) -> Result<DMatrix<f64>> {
        self.check_frame(frame)?;
        check_len("q", self.dof(), q.len())?;
        let pose = self.chain_pose(q);
        let p = pose.point(frame, local_point);
        let mut jac = DMatrix::zeros(3, self.dof());
        for i in 0..=frame {
            let col = pose.axes[i].cross(&(p - pose.origin(i)));
            jac.fixed_view_mut::<3, 1>(0, i).copy_from(&col);
        }
        Ok(jac)
    }
}
