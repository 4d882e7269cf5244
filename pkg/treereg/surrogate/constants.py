HIDDEN_UNITS = 25
MIN_FIT_SAMPLES = 10

DEFAULT_CAPACITY = 100
DEFAULT_WINDOW = 1000
DEFAULT_EPSILON = 1e-4
DEFAULT_LEARNING_RATE = 1e-3
DEFAULT_EPOCHS = 200
DEFAULT_BATCH_SIZE = 32
DEFAULT_AUGMENTATION = 250
DIRICHLET_ALPHA = 1.0
