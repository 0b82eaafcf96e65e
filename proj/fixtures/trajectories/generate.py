#!/usr/bin/env python3
# Copyright 2026 The bcverify Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the synthetic HighD-style trajectory fixtures.

Positions are integrated in exact rational arithmetic and the expected
conflict frames are computed here, independently of the C++ code, and written
to expected.json next to the CSV files.
"""

import json
from fractions import Fraction as F
from pathlib import Path

HERE = Path(__file__).resolve().parent
RATE = 25
T_SAFE = F(3)
LENGTH = F(5)
HEADER = "frame,id,x,y,width,height,xVelocity,xAcceleration,precedingId,laneId"


def num(q):
    f = float(q)
    return str(int(f)) if f == int(f) else repr(f)


class Vehicle:
    def __init__(self, vid, lane, front, speeds, length=LENGTH, preceding=0, mirrored=False):
        self.vid = vid
        self.lane = lane
        self.length = length
        self.preceding = preceding
        self.mirrored = mirrored
        self.front = [F(front)]
        self.speeds = [F(s) for s in speeds]
        for s in self.speeds[:-1]:
            self.front.append(self.front[-1] + s / RATE)

    def accel(self, k):
        if k + 1 < len(self.speeds):
            return (self.speeds[k + 1] - self.speeds[k]) * RATE
        return F(0)

    def row(self, k):
        if self.mirrored:
            x, v, a = -self.front[k], -self.speeds[k], -self.accel(k)
        else:
            x, v, a = self.front[k] - self.length, self.speeds[k], self.accel(k)
        return ",".join([
            str(k), str(self.vid), num(x), "0", num(self.length), "2", num(v), num(a),
            str(self.preceding), str(self.lane)])


def write(name, vehicles, frames, header=HEADER, drop_column=None):
    cols = header.split(",")
    keep = [i for i, c in enumerate(cols) if c != drop_column]
    lines = [",".join(cols[i] for i in keep)]
    for k in frames:
        for veh in vehicles:
            if k < len(veh.speeds):
                fields = veh.row(k).split(",")
                lines.append(",".join(fields[i] for i in keep))
    (HERE / name).write_text("\n".join(lines) + "\n")


def conflicts(follower, leader, frames):
    out = []
    for k in frames:
        gap = leader.front[k] - follower.front[k] - leader.length
        dv = follower.speeds[k] - leader.speeds[k]
        if gap > 0 and dv > 0 and gap / dv < T_SAFE:
            out.append(k)
    return out


def episodes(flagged):
    runs = []
    for k in flagged:
        if runs and runs[-1][1] == k - 1:
            runs[-1][1] = k
        else:
            runs.append([k, k])
    return runs


def decel_after(follower, leader, frames, a_min=F(-6), dt=F(1, RATE)):
    # Per-frame one-step braking; counts instances still below T_SAFE.
    left = []
    for k in conflicts(follower, leader, frames):
        gap = leader.front[k] - follower.front[k] - leader.length
        target = leader.speeds[k] + gap / T_SAFE
        v = max(target, follower.speeds[k] + a_min * dt)
        if v > target:
            left.append(k)
    return left


def main():
    expected = {}
    frames = range(100)

    # Follower at 30 m/s closes on a 20 m/s leader from a 50 m gap.
    lead = Vehicle(1, 2, 100, [20] * 100)
    foll = Vehicle(2, 2, 45, [30] * 100, preceding=1)
    write("closing.csv", [lead, foll], frames)
    flagged = conflicts(foll, lead, frames)
    expected["closing"] = {
        "conflict_frames": len(flagged), "first_conflict": flagged[0], "last_conflict": flagged[-1],
        "events": len(episodes(flagged)), "decel_after": len(decel_after(foll, lead, frames))}

    # Same pair, but the leader speeds up in between two closing phases.
    speeds = [20] * 75 + [40] * 100 + [20] * 125
    lead = Vehicle(1, 2, 100, speeds)
    foll = Vehicle(2, 2, 45, [30] * 300, preceding=1)
    frames2 = range(300)
    write("two_episodes.csv", [lead, foll], frames2)
    flagged = conflicts(foll, lead, frames2)
    expected["two_episodes"] = {
        "conflict_frames": len(flagged), "events": [list(e) for e in episodes(flagged)]}

    # Leader faster than follower throughout.
    lead = Vehicle(1, 3, 100, [30] * 100)
    foll = Vehicle(2, 3, 60, [25] * 100, preceding=1)
    write("no_conflict.csv", [lead, foll], frames)
    expected["no_conflict"] = {"conflict_frames": len(conflicts(foll, lead, frames))}

    # Ten frames, leader 20 m/s, follower 25 m/s; plus the mirrored recording.
    lead = Vehicle(1, 1, 80, [20] * 10)
    foll = Vehicle(2, 1, 40, [25] * 10, preceding=1)
    write("two_vehicle.csv", [lead, foll], range(10))
    write("two_vehicle_no_lane.csv", [lead, foll], range(10), drop_column="laneId")
    lead_m = Vehicle(1, 1, 80, [20] * 10, mirrored=True)
    foll_m = Vehicle(2, 1, 40, [25] * 10, preceding=1, mirrored=True)
    write("two_vehicle_mirrored.csv", [lead_m, foll_m], range(10))

    # Chain of three in one lane without a precedingId column, and a frame with
    # one vehicle per lane.
    chain = [Vehicle(1, 1, 100, [20]), Vehicle(2, 1, 60, [20]), Vehicle(3, 1, 20, [20])]
    solo = [Vehicle(4, 1, 300, [20]), Vehicle(5, 2, 300, [20]), Vehicle(6, 3, 300, [20])]
    lines = ["frame,id,x,width,xVelocity,xAcceleration,laneId"]
    for v in chain:
        lines.append(f"0,{v.vid},{num(v.front[0] - LENGTH)},5,20,0,{v.lane}")
    for v in solo:
        lines.append(f"1,{v.vid},{num(v.front[0] - LENGTH)},5,20,0,{v.lane}")
    (HERE / "chain.csv").write_text("\n".join(lines) + "\n")

    # precedingId of the last car skips the middle one.
    adv = [
        Vehicle(1, 1, 100, [20], preceding=0),
        Vehicle(2, 1, 60, [20], preceding=1),
        Vehicle(3, 1, 20, [20], preceding=1),
    ]
    write("adversarial_preceding.csv", adv, range(1))

    # Three lanes: closing pair in lane 2, the same pair driving in -x in
    # lane 5, and a separating pair in lane 3.
    lanes = [
        Vehicle(1, 2, 100, [20] * 100), Vehicle(2, 2, 45, [30] * 100, preceding=1),
        Vehicle(3, 5, 100, [20] * 100, mirrored=True),
        Vehicle(4, 5, 45, [30] * 100, preceding=3, mirrored=True),
        Vehicle(5, 3, 100, [30] * 100), Vehicle(6, 3, 60, [25] * 100, preceding=5),
    ]
    write("multi_lane.csv", lanes, frames)
    expected["multi_lane"] = {
        "lane_2": len(conflicts(lanes[1], lanes[0], frames)),
        "lane_5": len(conflicts(lanes[3], lanes[2], frames)),
        "lane_3": len(conflicts(lanes[5], lanes[4], frames))}

    # Repeating closing and opening phases over 3200 frames (128 s).
    period = [20] * 75 + [40] * 100 + [20] * 25
    lead = Vehicle(1, 4, 100, period * 16)
    foll = Vehicle(2, 4, 45, [30] * len(period) * 16, preceding=1)
    frames_long = range(len(period) * 16)
    write("long_periodic.csv", [lead, foll], frames_long)
    expected["long_periodic"] = {
        "conflict_frames": len(conflicts(foll, lead, frames_long)),
        "conflict_frames_300": len(conflicts(foll, lead, range(300))),
        "conflict_frames_3000": len(conflicts(foll, lead, range(3000))),
        "events": len(episodes(conflicts(foll, lead, frames_long))),
        "decel_after_300": len(decel_after(foll, lead, range(300)))}

    (HERE / "expected.json").write_text(json.dumps(expected, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
