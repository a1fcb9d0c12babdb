from app.cli import craft, diagram, measure, modes, primorial, sweep, walls

commands = [
    sweep.command,
    measure.command,
    diagram.command,
    walls.command,
    modes.command,
    primorial.command,
    craft.command,
]
