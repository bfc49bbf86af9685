from synthlab.synthlab import main
