#pragma once

#include <cstdint>
#include <vector>

#include "ssvep/core.hpp"

namespace ssvep {

// One recording session: part a (12 cued trials), a 30 s rest, part b
// (13 cued trials). Each trial is 5 s of flicker followed by 5 s of rest.
struct ScheduleSession {
  std::vector<CommandLabel> part_a;
  std::vector<CommandLabel> part_b;

  std::vector<CommandLabel> all_labels() const;
};

struct ProtocolSchedule {
  std::vector<ScheduleSession> sessions;
  double flicker_seconds = 5.0;
  double rest_seconds = 5.0;
  double inter_part_rest_seconds = 30.0;

  int total_trials() const;
  std::vector<int> trials_per_session() const;
};

// Pseudorandom near-balanced cue sequences: per session, part a holds 12
// labels (4 per command) and part b 13 (one command gets the extra slot), so
// per-session counts never differ by more than one.
ProtocolSchedule make_offline_schedule(std::uint64_t seed, int n_sessions = 5,
                                       int n_labels = 3);

// True when `sequence` is a valid part-a cue list: `length` labels in range,
// near-balanced (max/min count difference <= 1).
bool validate_cue_sequence(const std::vector<CommandLabel>& sequence, int length,
                           int n_labels);

// Cut a continuous single-session stream into per-trial recordings, keeping
// only the 5 s flicker windows and discarding every rest period. The stream
// must cover the session's full timeline (including the trailing rest).
std::vector<TrialRecording> slice_recording(const Matrix& continuous_stream,
                                            const ScheduleSession& session,
                                            const ProtocolSchedule& timing,
                                            const RecordingSpec& spec,
                                            int session_index = 0);

// Total samples a session's timeline spans, trailing rest included.
long session_timeline_samples(const ScheduleSession& session,
                              const ProtocolSchedule& timing,
                              const RecordingSpec& spec);

struct SplitResult {
  std::vector<TrialRecording> train;
  std::vector<TrialRecording> test;
  bool empty_test_warning = false;
};

// Deterministic stratified split within one subject's trials: per class,
// floor(count * (1 - train_fraction)) trials go to test, then the remaining
// slots up to floor(total * (1 - train_fraction)) are assigned by largest
// fractional part (ties to the lower label).
SplitResult split_subjectwise_stratified(const SubjectDataset& dataset,
                                         double train_fraction = 0.8,
                                         std::uint64_t seed = 0);

}  // namespace ssvep
