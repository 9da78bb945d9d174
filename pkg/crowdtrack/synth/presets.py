"""
Scripted scenes with known outcomes. They double as regression
scenarios for the whole pipeline.
"""

from __future__ import annotations

from crowdtrack.synth.scene import Actor, Color, SceneScript, Waypoint

RED_HAT: Color = (200, 30, 30)
GRAY_HAT: Color = (90, 90, 90)
DARK_GROUND: Color = (40, 40, 40)

SQUARE_SIDE = 40.0
WALK_SPEED = 2.0
MEETING_LEAD = 6.0
APPROACH_FRAMES = 20
WALK_FRAMES = 55


def _straight(
    actor_id: int,
    start: int,
    end: int,
    a: tuple[float, float],
    b: tuple[float, float],
    radius: float,
    color: Color,
) -> Actor:
    return Actor(actor_id, (Waypoint(start, *a), Waypoint(end, *b)), radius, color)


def single_actor_scene(num_frames: int = 10, noise_amplitude: int = 0) -> SceneScript:
    """One red hat walking right at 3 pixels per frame."""
    actor = _straight(1, 0, num_frames - 1, (20.0, 40.0), (20.0 + 3.0 * (num_frames - 1), 40.0), 5, RED_HAT)
    return SceneScript(max(120, int(40 + 3 * num_frames)), 80, num_frames, [actor], DARK_GROUND, noise_amplitude)


def _crossing_square(first_id: int, corner: tuple[float, float], first_meeting: int, radius: float) -> list[Actor]:
    """
    Two actors walking right on rows ``SQUARE_SIDE`` apart and two walking
    down on columns ``SQUARE_SIDE`` apart, timed so that each of them
    meets both actors of the other direction. Whenever a downward actor
    reaches a crossing point its rightward partner is ``MEETING_LEAD``
    pixels past it, so the discs overlap without being centred on each
    other. The first meeting is at ``corner`` at frame ``first_meeting``.
    """
    x, y = corner
    approach = WALK_SPEED * APPROACH_FRAMES
    span = WALK_SPEED * WALK_FRAMES
    between_meetings = round(SQUARE_SIDE / WALK_SPEED)

    actors = []
    for lane in range(2):
        start = first_meeting + lane * between_meetings - APPROACH_FRAMES
        end = start + WALK_FRAMES
        row = y + lane * SQUARE_SIDE
        column = x + lane * SQUARE_SIDE
        right_from = (x + MEETING_LEAD - approach, row)
        down_from = (column, y - approach)
        actors.append(
            _straight(first_id + 2 * lane, start, end, right_from, (right_from[0] + span, row), radius, RED_HAT)
        )
        actors.append(
            _straight(first_id + 2 * lane + 1, start, end, down_from, (column, down_from[1] + span), radius, RED_HAT)
        )
    return actors


def crowded_scene(noise_amplitude: int = 10) -> SceneScript:
    """
    Twelve actors in three crossing squares, twelve meetings in all.
    The first two squares overlap in time but not in space, the third
    starts once the first has left.
    """
    radius = 5
    squares = (
        ((50.0, 50.0), 25),
        ((230.0, 120.0), 70),
        ((140.0, 120.0), 140),
    )

    actors: list[Actor] = []
    for number, (corner, first_meeting) in enumerate(squares):
        actors.extend(_crossing_square(1 + 4 * number, corner, first_meeting, radius))

    return SceneScript(320, 240, 200, actors, DARK_GROUND, noise_amplitude)


def occlusion_scene(hidden_from: int = 30, hidden_frames: int = 10, noise_amplitude: int = 10) -> SceneScript:
    """
    A red hat walking right at 2 pixels per frame and a larger gray
    pedestrian that stands in a corner, except for ``hidden_frames``
    frames during which it covers the red hat completely.
    """
    num_frames = 80
    speed = 2.0
    y = 60.0

    def x_at(t: int) -> float:
        return 20.0 + speed * t

    walker = _straight(1, 0, num_frames - 1, (x_at(0), y), (x_at(num_frames - 1), y), 5, RED_HAT)

    corner = (300.0, 105.0)
    hidden_until = hidden_from + hidden_frames - 1
    occluder = Actor(
        2,
        (
            Waypoint(0, *corner),
            Waypoint(hidden_from - 1, *corner),
            Waypoint(hidden_from, x_at(hidden_from), y),
            Waypoint(hidden_until, x_at(hidden_until), y),
            Waypoint(hidden_until + 1, *corner),
            Waypoint(num_frames - 1, *corner),
        ),
        10,
        GRAY_HAT,
    )

    return SceneScript(320, 120, num_frames, [walker, occluder], DARK_GROUND, noise_amplitude)


def sparse_scene(noise_amplitude: int = 5) -> SceneScript:
    """Three actors on separate rows, for background subtraction."""
    num_frames = 60
    last = num_frames - 1
    speed = 4.0
    actors = [
        _straight(1, 0, last, (20.0, 50.0), (20.0 + speed * last, 50.0), 6, RED_HAT),
        _straight(2, 0, last, (290.0, 120.0), (290.0 - speed * last, 120.0), 6, RED_HAT),
        _straight(3, 0, last, (40.0, 190.0), (40.0 + speed * last, 190.0), 6, RED_HAT),
    ]
    return SceneScript(320, 240, num_frames, actors, (60, 60, 60), noise_amplitude)
