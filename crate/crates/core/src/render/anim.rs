use super::{render_scene, FrameSequence, RenderError, SceneSpec};

/// Maps symbolic states to scenes.
pub trait Animation {
    fn state_count(&self) -> usize;

    /// Scene `num/den` of the way from state `step` to state `step + 1`.
    /// `num == 0` is state `step` itself.
    fn scene_at(&self, step: usize, num: u32, den: u32) -> Result<SceneSpec, RenderError>;
}

/// Renders `frames_per_step` frames per transition followed by `hold` copies
/// of the final state: `frames_per_step * (states - 1) + hold` frames.
pub fn render_trajectory(anim: &dyn Animation, frames_per_step: u32, hold: u32) -> Result<FrameSequence, RenderError> {
    let n = anim.state_count();
    if n == 0 {
        return Err(RenderError::Animation("trajectory has no states".into()));
    }
    if frames_per_step == 0 || hold == 0 {
        return Err(RenderError::Animation("frames_per_step and hold must be positive".into()));
    }
    let mut frames = Vec::with_capacity(frames_per_step as usize * (n - 1) + hold as usize);
    let mut prev: Option<SceneSpec> = None;
    let mut push = |scene: SceneSpec, frames: &mut Vec<super::Frame>| -> Result<(), RenderError> {
        match (&prev, frames.last()) {
            (Some(p), Some(last)) if *p == scene => {
                let copy = last.clone();
                frames.push(copy);
            }
            _ => {
                frames.push(render_scene(&scene)?);
                prev = Some(scene);
            }
        }
        Ok(())
    };
    for step in 0..n - 1 {
        for f in 0..frames_per_step {
            push(anim.scene_at(step, f, frames_per_step)?, &mut frames)?;
        }
    }
    let last = anim.scene_at(n - 1, 0, 1)?;
    for _ in 0..hold {
        push(last.clone(), &mut frames)?;
    }
    FrameSequence::new(frames)
}

/// Per-element motion and visibility along a trajectory.
#[derive(Clone, Debug)]
pub struct ElementTrack {
    pub id: String,
    /// Offset from the base scene position at each state; empty for static elements.
    pub offsets: Vec<[f64; 2]>,
    /// Visibility at each state; empty means always visible. An element hidden at
    /// state `k` disappears on the first frame of state `k`.
    pub visible: Vec<bool>,
}

impl ElementTrack {
    pub fn moving(id: impl Into<String>, offsets: Vec<[f64; 2]>) -> Self {
        Self { id: id.into(), offsets, visible: Vec::new() }
    }

    pub fn toggled(id: impl Into<String>, visible: Vec<bool>) -> Self {
        Self { id: id.into(), offsets: Vec::new(), visible }
    }
}

/// Translation-and-visibility animation over a base scene.
#[derive(Clone, Debug)]
pub struct TrackAnimation {
    pub base: SceneSpec,
    pub tracks: Vec<ElementTrack>,
    pub states: usize,
}

impl TrackAnimation {
    pub fn new(base: SceneSpec, states: usize) -> Self {
        Self { base, tracks: Vec::new(), states }
    }

    pub fn track(mut self, track: ElementTrack) -> Self {
        self.tracks.push(track);
        self
    }
}

impl Animation for TrackAnimation {
    fn state_count(&self) -> usize {
        self.states
    }

    fn scene_at(&self, step: usize, num: u32, den: u32) -> Result<SceneSpec, RenderError> {
        let mut scene = self.base.clone();
        let t = num as f64 / den as f64;
        for tr in &self.tracks {
            for len in [tr.offsets.len(), tr.visible.len()] {
                if len != 0 && len != self.states {
                    return Err(RenderError::Animation(format!(
                        "track `{}` has {len} entries for {} states",
                        tr.id, self.states
                    )));
                }
            }
            if !tr.visible.is_empty() && !tr.visible[step] {
                scene.remove(&tr.id)?;
                continue;
            }
            if !tr.offsets.is_empty() {
                let a = tr.offsets[step];
                let b = if num == 0 { a } else { tr.offsets[step + 1] };
                scene.translate(&tr.id, a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t)?;
            } else if scene.element(&tr.id).is_none() {
                return Err(RenderError::UnknownElement(tr.id.clone()));
            }
        }
        Ok(scene)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::render::{Element, Rgb, Shape};

    fn base() -> SceneSpec {
        let mut s = SceneSpec::new(Rgb::WHITE);
        s.push(Element::filled("dot", Shape::Circle { cx: 100.0, cy: 100.0, r: 10.0 }, Rgb(0, 0, 200), 1));
        s.push(Element::filled("key", Shape::Rect { x: 200.0, y: 100.0, w: 20.0, h: 20.0 }, Rgb(200, 0, 0), 0));
        s
    }

    #[test]
    fn single_state_yields_hold_frames() {
        let anim = TrackAnimation::new(base(), 1);
        let seq = render_trajectory(&anim, 4, 12).unwrap();
        assert_eq!(seq.len(), 12);
        assert!(seq.frames().iter().all(|f| f == &seq.frames()[0]));
    }

    #[test]
    fn frame_count_formula_and_final_frame() {
        let offsets: Vec<[f64; 2]> = (0..19).map(|i| [i as f64 * 5.0, 0.0]).collect();
        let anim = TrackAnimation::new(base(), 19).track(ElementTrack::moving("dot", offsets));
        let seq = render_trajectory(&anim, 4, 12).unwrap();
        assert_eq!(seq.len(), 84);
        let last = render_scene(&anim.scene_at(18, 0, 1).unwrap()).unwrap();
        assert_eq!(seq.last().unwrap(), &last);
    }

    #[test]
    fn consumed_item_disappears_at_pickup_state() {
        let anim = TrackAnimation::new(base(), 3)
            .track(ElementTrack::moving("dot", vec![[0.0, 0.0], [50.0, 0.0], [110.0, 60.0]]))
            .track(ElementTrack::toggled("key", vec![true, true, false]));
        let seq = render_trajectory(&anim, 2, 1).unwrap();
        // frames: (0,0) (0,1) (1,0) (1,1) hold(2)
        assert_eq!(seq.frames()[3].get(205, 105), Rgb(200, 0, 0));
        assert_eq!(seq.frames()[4].get(205, 105), Rgb::WHITE);
    }

    #[test]
    fn unknown_track_id_is_an_error() {
        let anim = TrackAnimation::new(base(), 2).track(ElementTrack::moving("ghost", vec![[0.0, 0.0], [1.0, 0.0]]));
        assert!(matches!(render_trajectory(&anim, 2, 1), Err(RenderError::UnknownElement(_))));
    }
}
