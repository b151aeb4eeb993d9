# Test package for qml
