from pathlib import Path

import pytest

from rehabkit import derive_pick_labels, parse_clip_predictions, parse_pick_streams

from rehab_adapter import (
    Backend,
    BackendError,
    BackendSpec,
    StubMode,
    VideoReadError,
    clip_prediction_lines,
    infer_clip_predictions,
    infer_pick_stream,
    pick_stream_lines,
)
from conftest import write_toy_clip


def stub_spec(**overrides):
    return BackendSpec(**overrides)


class TestStubPickStreams:
    def test_one_probability_per_frame(self, tmp_path):
        clip = write_toy_clip(tmp_path / "ten.avi", 10)
        video_id, start, end, probs = infer_pick_stream(clip, stub_spec(seed=4))
        assert video_id == "ten"
        assert (start, end) == (0, 10)
        assert len(probs) == 10
        assert all(0.0 <= p <= 1.0 for p in probs)

    def test_deterministic_per_seed(self, tmp_path):
        clip = write_toy_clip(tmp_path / "det.avi", 12)
        first = infer_pick_stream(clip, stub_spec(seed=9))
        second = infer_pick_stream(clip, stub_spec(seed=9))
        assert first == second
        different = infer_pick_stream(clip, stub_spec(seed=10))
        assert different != first

    def test_emitted_file_parses_in_the_engine(self, toy_session):
        records = [infer_pick_stream(c, stub_spec(seed=2)) for c in toy_session.clips]
        streams = parse_pick_streams(pick_stream_lines(records))
        assert [s.video_id for s in streams] == ["toy-0", "toy-1", "toy-2"]

    def test_missing_video_is_a_read_error(self):
        with pytest.raises(VideoReadError, match="not found"):
            infer_pick_stream(Path("no-such.avi"), stub_spec())


class TestOracleMode:
    def test_probabilities_match_annotated_pick_frames(self, toy_session):
        spec = stub_spec(stub_mode=StubMode.ORACLE, manifest_path=toy_session.manifest_path)
        for clip, video in zip(toy_session.clips, toy_session.manifest.videos):
            _, _, _, probs = infer_pick_stream(clip, spec)
            expected = [float(b) for b in derive_pick_labels(video, pick_width=6)]
            assert probs == expected

    def test_unknown_video_rejected(self, toy_session, tmp_path):
        clip = write_toy_clip(tmp_path / "stranger.avi", 8)
        spec = stub_spec(stub_mode=StubMode.ORACLE, manifest_path=toy_session.manifest_path)
        with pytest.raises(BackendError, match="stranger"):
            infer_pick_stream(clip, spec)

    def test_frame_count_mismatch_rejected(self, toy_session, tmp_path):
        clip = write_toy_clip(tmp_path / "toy-0.avi", 7)  # manifest says 36
        spec = stub_spec(stub_mode=StubMode.ORACLE, manifest_path=toy_session.manifest_path)
        with pytest.raises(VideoReadError, match="manifest"):
            infer_pick_stream(clip, spec)

    def test_oracle_requires_manifest(self):
        with pytest.raises(BackendError, match="manifest"):
            stub_spec(stub_mode=StubMode.ORACLE)


class TestStubClipPredictions:
    def test_recognition_emits_25_scores(self, toy_session):
        records = infer_clip_predictions(toy_session.clips, stub_spec(seed=1), "recognition")
        assert len(records) == 3
        assert all(len(scores) == 25 for _, _, scores in records)

    def test_form_emits_2_scores(self, toy_session):
        records = infer_clip_predictions(toy_session.clips, stub_spec(seed=1), "form")
        assert all(len(scores) == 2 for _, _, scores in records)

    def test_emitted_file_parses_in_the_engine(self, toy_session):
        records = infer_clip_predictions(toy_session.clips, stub_spec(seed=6), "recognition")
        predictions = parse_clip_predictions(clip_prediction_lines(records))
        assert [p.clip_id for p in predictions] == ["toy-0", "toy-1", "toy-2"]

    def test_unknown_task_rejected(self, toy_session):
        with pytest.raises(BackendError, match="unknown task"):
            infer_clip_predictions(toy_session.clips, stub_spec(), "dance")


@pytest.fixture(scope="module")
def torchscript_modules(tmp_path_factory):
    torch = pytest.importorskip("torch")
    root = tmp_path_factory.mktemp("ts")

    class PickNet(torch.nn.Module):
        def forward(self, frames):
            return frames.mean(dim=(1, 2, 3)) - 0.5  # (N,) logits

    class ClipNet(torch.nn.Module):
        def __init__(self, n_out):
            super().__init__()
            self.n_out = n_out

        def forward(self, frames):
            return torch.arange(self.n_out, dtype=torch.float32) * frames.mean()

    pick_path = root / "pick.pt"
    clip25_path = root / "clip25.pt"
    clip2_path = root / "clip2.pt"
    torch.jit.script(PickNet()).save(str(pick_path))
    torch.jit.script(ClipNet(25)).save(str(clip25_path))
    torch.jit.script(ClipNet(2)).save(str(clip2_path))
    return {"pick": pick_path, "clip25": clip25_path, "clip2": clip2_path}


class TestTorchScriptBackends:
    def test_pick_classifier_runs_a_loaded_module(self, toy_session, torchscript_modules):
        spec = BackendSpec(backend=Backend.PICK_CLASSIFIER, weights_path=torchscript_modules["pick"])
        video_id, start, end, probs = infer_pick_stream(toy_session.clips[0], spec)
        assert end - start == len(probs) == 36
        assert all(0.0 <= p <= 1.0 for p in probs)
        streams = parse_pick_streams(pick_stream_lines([(video_id, start, end, probs)]))
        assert len(streams) == 1

    def test_clip_classifier_scores_have_task_length(self, toy_session, torchscript_modules):
        spec = BackendSpec(
            backend=Backend.CLIP_CLASSIFIER,
            weights_path=torchscript_modules["clip25"],
            frame_sampling=4,
        )
        records = infer_clip_predictions(toy_session.clips[:1], spec, "recognition")
        assert len(records[0][2]) == 25

    def test_output_length_mismatch_is_a_backend_error(self, toy_session, torchscript_modules):
        spec = BackendSpec(
            backend=Backend.CLIP_CLASSIFIER, weights_path=torchscript_modules["clip25"]
        )
        with pytest.raises(BackendError, match="needs 2"):
            infer_clip_predictions(toy_session.clips[:1], spec, "form")

    def test_non_stub_backend_requires_weights(self):
        with pytest.raises(BackendError, match="weights_path"):
            BackendSpec(backend=Backend.PICK_CLASSIFIER)

    def test_missing_weights_file(self, toy_session):
        spec = BackendSpec(backend=Backend.PICK_CLASSIFIER, weights_path=Path("gone.pt"))
        with pytest.raises(BackendError, match="not found"):
            infer_pick_stream(toy_session.clips[0], spec)
