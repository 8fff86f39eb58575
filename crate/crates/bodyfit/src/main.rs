fn main() {
    // CLI wiring lands with the pipeline modules.
}
