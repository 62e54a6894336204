"""Q8 meshes: element kinematics, structured generation, text mesh files."""
