//! Line-delimited recording format: one JSON object per frame.
//!
//! ```text
//! {"t":0,"left":"open","right":"index","f0":null,"f1":[12.5,180.0,-3.2],"f2":null,"f3":null,"f4":null}
//! ```

use std::io::{BufRead, Write};

use super::{Frame, FrameRecord, Recording, Source};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Parses a recording. Blank lines are skipped; line numbers in errors are 1-based.
pub fn load_recording<T: Scalar, R: BufRead>(reader: R) -> Result<Recording<T>> {
    let mut frames = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let record: FrameRecord<T> = serde_json::from_str(trimmed).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        frames.push(Frame::from(record));
    }
    let recording = Recording {
        frames,
        source: Source::File,
        user_id: String::new(),
    };
    recording.validate()?;
    Ok(recording)
}

pub fn write_recording<T: Scalar, W: Write>(mut writer: W, recording: &Recording<T>) -> Result<()> {
    for frame in &recording.frames {
        let record = FrameRecord::from(frame.clone());
        serde_json::to_writer(&mut writer, &record).map_err(std::io::Error::other)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{Finger, LeftHand, RightHand};

    #[test]
    fn empty_stream() {
        let rec: Recording<f64> = load_recording("".as_bytes()).unwrap();
        assert!(rec.frames.is_empty());
    }

    #[test]
    fn three_frames_in_order() {
        let text = r#"{"t":0,"left":"open","right":"index","f0":null,"f1":[1,2,3],"f2":null,"f3":null,"f4":null}
{"t":10,"left":"fist","right":"open","f0":[0,0,0],"f1":null,"f2":[1.5,2,3],"f3":null,"f4":null}
{"t":20,"left":"absent","right":"absent","f0":null,"f1":null,"f2":null,"f3":null,"f4":null}
"#;
        let rec: Recording<f64> = load_recording(text.as_bytes()).unwrap();
        assert_eq!(rec.frames.len(), 3);
        assert_eq!(
            rec.frames.iter().map(|f| f.t).collect::<Vec<_>>(),
            vec![0, 10, 20]
        );
        assert_eq!(rec.frames[0].right, RightHand::IndexOnly);
        assert_eq!(rec.frames[1].left, LeftHand::Fist);
        assert_eq!(rec.frames[1].tip(Finger::Middle), Some([1.5, 2.0, 3.0]));
    }

    #[test]
    fn decreasing_time_names_index() {
        let text = r#"{"t":5,"left":"open","right":"fist"}
{"t":9,"left":"open","right":"fist"}
{"t":7,"left":"open","right":"fist"}"#;
        let err = load_recording::<f64, _>(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Validation { index: 2, .. }), "{err}");
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = "{\"t\":0,\"left\":\"open\",\"right\":\"fist\"}\n\n{\"t\":1,\"left\":\"sideways\"}\n";
        let err = load_recording::<f64, _>(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn tips_with_absent_right_hand_rejected() {
        let text = r#"{"t":0,"left":"open","right":"absent","f1":[0,0,0]}"#;
        let err = load_recording::<f64, _>(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Validation { index: 0, .. }));
    }

    #[test]
    fn write_then_load() {
        let rec = Recording {
            frames: vec![
                Frame::new(0, LeftHand::Open, RightHand::IndexOnly)
                    .with_tip(Finger::Index, [0.1, -2.25, 1e-3]),
                Frame::new(16, LeftHand::Fist, RightHand::Open),
            ],
            source: Source::File,
            user_id: String::new(),
        };
        let mut buf = Vec::new();
        write_recording(&mut buf, &rec).unwrap();
        let back: Recording<f64> = load_recording(buf.as_slice()).unwrap();
        assert_eq!(back, rec);
    }
}
