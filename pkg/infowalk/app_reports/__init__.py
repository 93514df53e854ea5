from .report_utils import generate_loss_chart, generate_walk_length_histogram, get_descriptives
