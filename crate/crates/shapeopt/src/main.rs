fn main() {
    std::process::exit(shapeopt::cli::main(std::env::args_os()));
}
